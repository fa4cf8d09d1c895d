"""Zig-zag paths: the perturbation series as a weighted path sum.

A zig-zag alternates two kinds of steps between cells:

* type I: from a cell to one of its facets along a non-constant entry of the
  cellular differential (weight: that polynomial entry);
* type II: from a cell up to a cell of one dimension more in the same bundle
  class (weight: the matching entry of the pseudoinverse of the class boundary).

It starts and ends with a type I step.  With ``l`` type II steps the path
contributes ``(-1)^l`` times the product of its weights, and summing over all
paths recovers the series entry by entry.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterator, List, Optional

from .errors import Mismatch, NotTypeI, NotTypeII, TooLarge
from .hhl import LineBundleComplex
from .hpl import SDRDatum, perturbation_of
from .pinv import mp_inverse
from .polyring import Poly, PolyMatrix
from .grading import Grading

TYPE_I, TYPE_II = "I", "II"
MAX_PATHS = 100_000


@dataclass(frozen=True)
class PairClass:
    kind: Optional[str]
    source: str
    target: str


@dataclass(frozen=True)
class ZigZagPath:
    cells: tuple
    kinds: tuple
    weight: Poly

    @property
    def length(self) -> int:
        return len(self.kinds)

    def type_two_steps(self) -> int:
        return sum(1 for k in self.kinds if k == TYPE_II)


class PathContext:
    """Lookup tables shared by the weight functions and the enumerators.

    ``up_weight`` overrides the type II weight; by default it is the
    pseudoinverse entry, and for a user homotopy ``h`` it should be ``-h``.
    """

    def __init__(self, C: LineBundleComplex, grading: Grading,
                 up_weight: Optional[Callable[[int, int], Fraction]] = None):
        self.C = C
        self.grading = grading
        self.strat = C.strat
        self.delta = perturbation_of(C)
        self.pos = {g.cell: j for t in C.terms for j, g in enumerate(t)}
        self._pinv = {}
        for B in grading.complexes:
            for i in range(1, C.length + 1):
                self._pinv[(B.class_id, i)] = (B, mp_inverse(B.d(i)))
        self.up_weight = up_weight or self._mp_up

    def cell(self, name_or_id):
        if isinstance(name_or_id, int):
            return self.strat.cells[name_or_id]
        return self.strat.by_name(name_or_id)

    def _mp_up(self, low: int, high: int) -> Fraction:
        a, b = self.cell(low), self.cell(high)
        cid = self.grading.cell_class[a.id]
        B, P = self._pinv[(cid, b.dim)]
        return P[B.cells[b.dim].index(b.id), B.cells[a.dim].index(a.id)]

    def down(self, cid: int):
        """Type I successors of a cell: ``(facet id, weight)``."""
        c = self.cell(cid)
        if c.dim == 0:
            return []
        D = self.delta[c.dim]
        col = self.pos[c.id]
        out = []
        for g in self.C.terms[c.dim - 1]:
            p = D[self.pos[g.cell], col]
            if not p.is_zero():
                out.append((g.cell, p))
        return out

    def up(self, cid: int):
        """Type II successors of a cell: ``(cell id, weight)`` within its class."""
        c = self.cell(cid)
        if c.dim >= self.C.length:
            return []
        B = self.grading.bm(self.grading.cell_class[c.id])
        out = []
        for other in B.cells[c.dim + 1]:
            w = self.up_weight(c.id, other)
            if w:
                out.append((other, Fraction(w)))
        return out


def classify_pair(ctx: PathContext, source, target) -> PairClass:
    a, b = ctx.cell(source), ctx.cell(target)
    if b.dim == a.dim - 1 and any(c == b.id for c, _ in ctx.down(a.id)):
        kind = TYPE_I
    elif b.dim == a.dim + 1 and any(c == b.id for c, _ in ctx.up(a.id)):
        kind = TYPE_II
    else:
        kind = None
    return PairClass(kind, a.name, b.name)


def hhl_weight(ctx: PathContext, source, target) -> Poly:
    a, b = ctx.cell(source), ctx.cell(target)
    for c, p in ctx.down(a.id):
        if c == b.id:
            return p
    raise NotTypeI(f"{a.name} -> {b.name} is not a type I step")


def mp_weight(ctx: PathContext, source, target) -> Fraction:
    a, b = ctx.cell(source), ctx.cell(target)
    for c, w in ctx.up(a.id):
        if c == b.id:
            return w
    raise NotTypeII(f"{a.name} -> {b.name} is not a type II step")


def enumerate_paths(ctx: PathContext, source, target, limit: int = MAX_PATHS) -> Iterator[ZigZagPath]:
    """All zig-zags from ``source`` (dim i) to ``target`` (dim i-1), depth first."""
    a, b = ctx.cell(source), ctx.cell(target)
    n = ctx.C.n
    count = [0]

    def walk(cur, cells, kinds, weight):
        for nxt, p in ctx.down(cur):
            w1 = weight * p
            if nxt == b.id:
                count[0] += 1
                if count[0] > limit:
                    raise TooLarge(f"more than {limit} zig-zag paths")
                yield ZigZagPath(cells + (nxt,), kinds + (TYPE_I,), w1)
            for up, w in ctx.up(nxt):
                yield from walk(up, cells + (nxt, up), kinds + (TYPE_I, TYPE_II), w1.scale(-w))

    if b.dim != a.dim - 1:
        return
    yield from walk(a.id, (a.id,), (), Poly.const(n, 1))


def sigma_via_paths(ctx: PathContext, degree: int) -> PolyMatrix:
    """Series in one degree as a path sum, memoised on the starting cell.

    ``value(s) = delta[:, s] - sum_{t, s'} delta[t, s] w(t, s') value(s')``.
    """
    C = ctx.C
    n = C.n
    memo: Dict[int, Dict[int, Poly]] = {}

    def value(cid):
        if cid in memo:
            return memo[cid]
        memo[cid] = None  # cycle guard
        acc: Dict[int, Poly] = {}
        for t, p in ctx.down(cid):
            acc[t] = acc[t] + p if t in acc else p
            for up, w in ctx.up(t):
                sub = value(up)
                if sub is None:
                    raise Mismatch("zig-zag graph has a cycle", ("paths", "series"))
                for r, q in sub.items():
                    term = (p * q).scale(-w)
                    acc[r] = acc[r] + term if r in acc else term
        memo[cid] = {r: q for r, q in acc.items() if not q.is_zero()}
        return memo[cid]

    entries = {}
    for col, g in enumerate(C.terms[degree]):
        for r, q in value(g.cell).items():
            entries[(ctx.pos[r], col)] = q
    return PolyMatrix(len(C.terms[degree - 1]), len(C.terms[degree]), n, entries)


def sigma_by_enumeration(ctx: PathContext, degree: int, limit: int = MAX_PATHS) -> PolyMatrix:
    """Same series, summing explicitly enumerated paths (small inputs only)."""
    C = ctx.C
    entries = {}
    for col, g in enumerate(C.terms[degree]):
        for row, f in enumerate(C.terms[degree - 1]):
            total = Poly.const(C.n, 0)
            for path in enumerate_paths(ctx, g.cell, f.cell, limit):
                total = total + path.weight
            if not total.is_zero():
                entries[(row, col)] = total
    return PolyMatrix(len(C.terms[degree - 1]), len(C.terms[degree]), C.n, entries)


def context_for(S: SDRDatum, grading: Grading) -> PathContext:
    """Path context whose type II weights are ``-h`` of the given SDR."""
    C = S.big
    pos = {g.cell: j for t in C.terms for j, g in enumerate(t)}
    strat = C.strat

    def weight(low, high):
        return -S.h[strat.cells[low].dim][pos[high], pos[low]]

    return PathContext(C, grading, weight)


def crosscheck_sigma(S: SDRDatum, grading: Grading, sigma: Dict[int, PolyMatrix],
                     d_min: Optional[Dict[int, PolyMatrix]] = None,
                     enumerate_limit: Optional[int] = None,
                     context: Optional[PathContext] = None) -> dict:
    """Compare the series (and optionally ``d_min``) with the path sums.

    ``context`` overrides the path weights (default: ``-h`` of ``S``).
    Raises :class:`Mismatch` naming the first differing degree and entry.
    """
    ctx = context or context_for(S, grading)
    report = {}
    for d in sorted(sigma):
        via = sigma_via_paths(ctx, d)
        _compare(via, sigma[d], ("paths", "series"), d, ctx.C.names)
        if enumerate_limit:
            explicit = sigma_by_enumeration(ctx, d, enumerate_limit)
            _compare(explicit, sigma[d], ("enumerated paths", "series"), d, ctx.C.names)
        if d_min is not None:
            n = S.n
            dm = PolyMatrix.from_rat(S.p[d - 1], n) @ via @ PolyMatrix.from_rat(S.i[d], n)
            _compare(dm, d_min[d], ("path d_min", "d_min"), d, ctx.C.names)
        report[d] = True
    return report


def _compare(A: PolyMatrix, B: PolyMatrix, pair, degree, names):
    diff = A - B
    if not diff.is_zero():
        (r, c), p = min(diff.entries.items())
        raise Mismatch(f"{pair[0]} and {pair[1]} differ in degree {degree} at ({r}, {c}) "
                       f"by {p.to_text(names)}", pair)
