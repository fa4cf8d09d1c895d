"""Cells of the periodic arrangement ``<f, b_i> in Z`` on the torus R^k / Z^k.

A cell of the arrangement in R^k is described by a *label*: for every
coordinate ``i`` either ``H_i = m_i`` (kind ``EQ``) or ``m_i < H_i < m_i + 1``
(kind ``INT``).  Labels are stored as tuples of ``(m_i, kind)`` pairs so that
plain tuple comparison is the lexicographic order used for canonical
representatives.  Deck translation by ``lam`` in Z^k shifts ``m`` by
``psi^T lam`` and keeps the kinds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import floor
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import DimensionTooLarge, RankDeficient, ValidationError
from .lattice import ClassGroup
from .ratlin import RatMatrix, StrictSystem, det, feasible_interior_point, kernel_basis, rank, solve

EQ, INT = 0, 1
MAX_TORUS_DIM = 3
PREFIXES = "VEFC"


@dataclass(frozen=True)
class Quadruple:
    """Cox-style input data.  Only ``n``, ``k`` and ``psi`` enter the matrices."""
    n: int
    k: int
    psi: tuple
    fan: Optional[tuple] = None
    names: Optional[tuple] = None
    group: Optional[str] = None

    def __post_init__(self):
        psi = tuple(tuple(int(x) for x in row) for row in self.psi)
        object.__setattr__(self, "psi", psi)
        if len(psi) != self.k or any(len(r) != self.n for r in psi):
            raise ValidationError(f"psi must be a {self.k}x{self.n} integer matrix")
        if self.k > MAX_TORUS_DIM:
            raise DimensionTooLarge(f"torus dimension k={self.k} exceeds {MAX_TORUS_DIM}")
        if self.k < 1:
            raise ValidationError("torus dimension k must be at least 1")
        if rank(RatMatrix(psi, self.k, self.n)) < self.k:
            raise RankDeficient(f"psi has rank < k={self.k}")
        if self.fan is not None:
            fan = tuple(tuple(sorted(int(i) for i in cone)) for cone in self.fan)
            for cone in fan:
                if any(not 1 <= i <= self.n for i in cone):
                    raise ValidationError(f"fan cone {cone} is not a subset of 1..{self.n}")
            object.__setattr__(self, "fan", fan)
        if self.names is not None:
            names = tuple(self.names)
            if len(names) != self.n or len(set(names)) != self.n:
                raise ValidationError("variable names must be n distinct strings")
            object.__setattr__(self, "names", names)

    @property
    def variable_names(self) -> tuple:
        return self.names or tuple(f"x{i + 1}" for i in range(self.n))

    def b(self, i: int) -> tuple:
        return tuple(row[i] for row in self.psi)


def ceiling_vector(label) -> tuple:
    """``a_i = m_i`` on equalities and ``m_i + 1`` on open intervals."""
    return tuple(m + (1 if kind == INT else 0) for m, kind in label)


def label_system(q: Quadruple, label, cube: bool = False, only=None) -> StrictSystem:
    """Constraints of a (possibly partial) label; ``only`` restricts the coordinates used."""
    eqs, strict = [], []
    for i, (m, kind) in enumerate(label):
        if only is not None and i not in only:
            continue
        b = q.b(i)
        if kind == EQ:
            eqs.append((b, Fraction(m)))
        else:
            strict.append((b, Fraction(m), Fraction(m + 1)))
    closed = ()
    if cube:
        closed = tuple((tuple(int(i == j) for j in range(q.k)), Fraction(0), Fraction(1))
                       for i in range(q.k))
    return StrictSystem(q.k, tuple(eqs), tuple(strict), closed)


def label_of_point(q: Quadruple, f) -> tuple:
    out = []
    for i in range(q.n):
        v = sum((Fraction(c) * x for c, x in zip(q.b(i), f)), Fraction(0))
        m = floor(v)
        out.append((m, EQ if v == m else INT))
    return tuple(out)


def _eq_rank(q: Quadruple, kinds) -> int:
    return _rank_of(q.psi, tuple(i for i, kind in enumerate(kinds) if kind == EQ))


@lru_cache(maxsize=4096)
def _rank_of(psi, indices) -> int:
    rows = [tuple(row[i] for row in psi) for i in indices]
    return rank(RatMatrix(rows, len(rows), len(psi))) if rows else 0


def _tangent_basis(q: Quadruple, kinds) -> tuple:
    rows = [q.b(i) for i, kind in enumerate(kinds) if kind == EQ]
    return tuple(kernel_basis(RatMatrix(rows, len(rows), q.k)))


@dataclass(frozen=True)
class TorusCell:
    id: int
    name: str
    label: tuple
    dim: int
    ceiling: tuple
    orientation: tuple
    point: tuple

    @property
    def kinds(self) -> tuple:
        return tuple(kind for _, kind in self.label)


@dataclass(frozen=True)
class FacetIncidence:
    parent: int
    child: int
    shift: tuple
    epsilon: tuple
    sign: int


@dataclass
class Stratification:
    quadruple: Quadruple
    cells: List[TorusCell]
    classes: ClassGroup
    incidences: Dict[int, List[FacetIncidence]] = field(default_factory=dict)
    _index: Dict[tuple, int] = field(default_factory=dict, repr=False)

    def by_dim(self, d: int) -> List[TorusCell]:
        return [c for c in self.cells if c.dim == d]

    def counts(self) -> tuple:
        return tuple(len(self.by_dim(d)) for d in range(self.quadruple.k + 1))

    def orbit_key(self, label) -> tuple:
        kinds = tuple(kind for _, kind in label)
        return kinds, self.classes.class_of([m for m, _ in label])

    def find(self, label) -> Tuple[int, tuple]:
        """Cell id of the orbit of ``label`` and the deck shift taking the canonical lift to it."""
        cid = self._index[self.orbit_key(label)]
        lam = self.classes.shift([m for m, _ in self.cells[cid].label], [m for m, _ in label])
        return cid, lam

    def locate(self, point) -> int:
        """Id of the torus cell containing ``point`` (any lift)."""
        return self.find(label_of_point(self.quadruple, point))[0]

    def by_name(self, name: str) -> TorusCell:
        for c in self.cells:
            if c.name == name:
                return c
        raise KeyError(name)


def _candidate_options(q: Quadruple, i: int):
    b = q.b(i)
    lo = sum(min(0, x) for x in b)
    hi = sum(max(0, x) for x in b)
    if lo == hi:
        return [(lo, EQ)]
    opts = []
    for m in range(lo, hi + 1):
        opts.append((m, EQ))
        if m < hi:
            opts.append((m, INT))
    return opts


def _feasible(q: Quadruple, partial, cube: bool):
    # partial labels constrain only their first len(partial) coordinates
    return feasible_interior_point(label_system(q, partial, cube=cube))


def enumerate_cells(q: Quadruple) -> Stratification:
    """All deck-orbits of cells, with canonical lifts and facet incidences.

    Candidate labels are grown one coordinate at a time; a partial label is
    kept only while its constraints meet the closed unit cube.  Every orbit
    has a lift meeting the cube, and the lexicographically smallest such lift
    is the canonical one.
    """
    options = [_candidate_options(q, i) for i in range(q.n)]
    found = []

    def grow(partial):
        if len(partial) == q.n:
            found.append(tuple(partial))
            return
        for opt in options[len(partial)]:
            nxt = partial + [opt]
            if _feasible(q, nxt, cube=True) is not None:
                grow(nxt)

    grow([])
    classes = ClassGroup(q.psi)
    orbits: Dict[tuple, tuple] = {}
    for label in found:
        kinds = tuple(kind for _, kind in label)
        key = (kinds, classes.class_of([m for m, _ in label]))
        if key not in orbits or label < orbits[key]:
            orbits[key] = label
    reps = sorted(orbits.values(), key=lambda lab: (q.k - _eq_rank(q, [k for _, k in lab]), lab))
    cells = []
    counter = [0] * (q.k + 1)
    for label in reps:
        kinds = [kind for _, kind in label]
        dim = q.k - _eq_rank(q, kinds)
        counter[dim] += 1
        point = _feasible(q, list(label), cube=True)
        cells.append(TorusCell(
            id=len(cells),
            name=f"{PREFIXES[dim]}{counter[dim]}",
            label=label,
            dim=dim,
            ceiling=ceiling_vector(label),
            orientation=_tangent_basis(q, kinds),
            point=point,
        ))
    strat = Stratification(q, cells, classes)
    strat._index = {strat.orbit_key(c.label): c.id for c in cells}
    for c in cells:
        strat.incidences[c.id] = facet_lifts(c, strat)
    return strat


def _coords(basis: Sequence[Sequence], v) -> tuple:
    B = RatMatrix.from_columns(basis, len(v))
    x = solve(B, v)
    if x is None:
        raise ArithmeticError("vector is not in the span of the orientation basis")
    return x


def incidence_sign(parent: TorusCell, child_orientation, parent_point, child_point) -> int:
    """Outward vector first, then the child's orientation, in parent coordinates."""
    outward = tuple(c - p for c, p in zip(child_point, parent_point))
    cols = [_coords(parent.orientation, outward)]
    cols += [_coords(parent.orientation, w) for w in child_orientation]
    d = det(RatMatrix.from_columns(cols, parent.dim))
    if d == 0:
        raise ArithmeticError("degenerate incidence orientation")
    return 1 if d > 0 else -1


def facet_lifts(sigma: TorusCell, strat: Stratification) -> List[FacetIncidence]:
    """Facets of the canonical lift of ``sigma``, matched to their torus cells."""
    if sigma.dim == 0:
        return []
    q = strat.quadruple
    target_rank = q.k - sigma.dim + 1
    free = [i for i, (_, kind) in enumerate(sigma.label) if kind == INT]
    children = []

    fixed = {i for i in range(q.n) if i not in free}

    def grow(label, pos, changed):
        decided = fixed | set(free[:pos])
        r = _eq_rank(q, [k if i in decided else INT for i, (_, k) in enumerate(label)])
        if r > target_rank:
            return
        if changed and feasible_interior_point(label_system(q, label, only=decided)) is None:
            return
        if pos == len(free):
            if changed and r == target_rank:
                children.append(tuple(label))
            return
        i = free[pos]
        m = sigma.label[i][0]
        for opt, ch in (((m, INT), False), ((m, EQ), True), ((m + 1, EQ), True)):
            nxt = list(label)
            nxt[i] = opt
            grow(nxt, pos + 1, changed or ch)

    grow(list(sigma.label), 0, False)
    out = []
    for child_label in sorted(set(children)):
        cid, lam = strat.find(child_label)
        child = strat.cells[cid]
        eps = tuple(a - b for a, b in zip(sigma.ceiling, ceiling_vector(child_label)))
        p_child = feasible_interior_point(label_system(q, child_label))
        sign = incidence_sign(sigma, child.orientation, sigma.point, p_child)
        out.append(FacetIncidence(sigma.id, cid, lam, eps, sign))
    return out
