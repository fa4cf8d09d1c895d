"""Strong deformation retracts, the perturbation series and the minimal resolution.

Degree conventions (``k`` = length of the cellular complex):

* ``d[i]``: ``C_i -> C_{i-1}`` for ``1 <= i <= k``
* ``h[i]``: ``C_i -> C_{i+1}`` for ``0 <= i < k``
* ``sigma[i]``: ``C_i -> C_{i-1}``, the series ``delta (h delta)^j`` summed over ``j``
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence

from .errors import (BadUserBasis, IdentityFailure, InvalidContraction, NonNilpotent,
                     NotMinimal, ValidationError)
from .grading import (BMComplex, Grading, betti_table, build_bm_complexes,
                      find_positive_grading, harmonic_basis)
from .hhl import Generator, LineBundleComplex, build_hhl_complex, verify_complex
from .lattice import ClassId
from .pinv import mp_inverse
from .polyring import PolyMatrix, constant_part
from .ratlin import RatMatrix, inverse, rank, rref
from .strat import Quadruple, Stratification, enumerate_cells

MOORE_PENROSE = "moore-penrose"
USER = "user-supplied"


@dataclass
class Contraction:
    """Homotopy blocks ``blocks[(class, i)]: class cells of degree i -> degree i+1``."""
    provenance: str
    blocks: Dict[tuple, RatMatrix] = field(default_factory=dict)

    def block(self, B: BMComplex, i: int) -> RatMatrix:
        return self.blocks.get((B.class_id, i), RatMatrix.zeros(B.size(i + 1), B.size(i)))


def mp_contraction(grading: Grading, length: int) -> Contraction:
    blocks = {}
    for B in grading.complexes:
        for i in range(length):
            blocks[(B.class_id, i)] = -mp_inverse(B.d(i + 1))
    return Contraction(MOORE_PENROSE, blocks)


def _cell_pair(C: LineBundleComplex, grading: Grading, src: str, dst: str):
    strat = C.strat
    try:
        a = strat.by_name(src)
        b = strat.by_name(dst)
    except KeyError as exc:
        raise InvalidContraction(f"unknown cell {exc.args[0]!r} in contraction") from None
    if b.dim != a.dim + 1:
        raise InvalidContraction(f"homotopy entry {src}->{dst} must raise dimension by one")
    if grading.cell_class[a.id] != grading.cell_class[b.id]:
        raise InvalidContraction(f"homotopy entry {src}->{dst} crosses bundle classes")
    return a, b


def contraction_from_entries(C: LineBundleComplex, grading: Grading, entries,
                             kind: str = "homotopy") -> Contraction:
    """User homotopy from sparse ``(source cell, target cell, value)`` entries.

    ``kind`` is ``"homotopy"`` (values are entries of h) or ``"splitting"``
    (values are entries of a right inverse s of the differential; h = -s).
    """
    if kind == "matching":
        return contraction_from_matching(C, grading, entries)
    if kind not in ("homotopy", "splitting"):
        raise InvalidContraction(f"unknown contraction kind {kind!r}")
    blocks: Dict[tuple, Dict[tuple, Fraction]] = {}
    for src, dst, value in entries:
        a, b = _cell_pair(C, grading, src, dst)
        value = Fraction(value)
        if kind == "splitting":
            value = -value
        cid = grading.cell_class[a.id]
        B = grading.bm(cid)
        r = B.cells[b.dim].index(b.id)
        c = B.cells[a.dim].index(a.id)
        blocks.setdefault((cid, a.dim), {})[(r, c)] = value
    out = {}
    for (cid, i), vals in blocks.items():
        B = grading.bm(cid)
        M = [[Fraction(0)] * B.size(i) for _ in range(B.size(i + 1))]
        for (r, c), v in vals.items():
            M[r][c] = v
        out[(cid, i)] = RatMatrix(M, B.size(i + 1), B.size(i))
    return Contraction(USER, out)


def contraction_from_matching(C: LineBundleComplex, grading: Grading, pairs) -> Contraction:
    """Homotopy of a Morse matching given as ``(lower cell, upper cell)`` pairs.

    In each class and degree, with ``A`` the matched lower cells and ``B``
    their partners, ``h = -incl_B phi^-1 proj_A`` where ``phi`` is the block of
    the class boundary from ``B`` to ``A``.  Acyclicity of the matching makes
    ``phi`` triangular, hence invertible; the SDR axioms are checked later.
    """
    grouped: Dict[tuple, list] = {}
    seen = set()
    for src, dst in pairs:
        a, b = _cell_pair(C, grading, src, dst)
        if a.id in seen or b.id in seen:
            raise InvalidContraction(f"cell matched twice in pair {src}, {dst}")
        seen.update((a.id, b.id))
        grouped.setdefault((grading.cell_class[a.id], a.dim), []).append((a.id, b.id))
    out = {}
    for (cid, i), prs in grouped.items():
        B = grading.bm(cid)
        rows = [B.cells[i].index(a) for a, _ in prs]
        cols = [B.cells[i + 1].index(b) for _, b in prs]
        phi = B.d(i + 1).submatrix(rows, cols)
        if rank(phi) < len(prs):
            raise InvalidContraction(f"matching in class {grading.label(cid)}, degree {i} "
                                     f"is not acyclic: boundary block is singular")
        inv = inverse(phi)
        M = [[Fraction(0)] * B.size(i) for _ in range(B.size(i + 1))]
        for x, r in enumerate(cols):
            for y, c in enumerate(rows):
                M[r][c] = -inv[x, y]
        out[(cid, i)] = RatMatrix(M, B.size(i + 1), B.size(i))
    return Contraction(USER, out)


@dataclass
class SDRDatum:
    n: int
    big: LineBundleComplex
    small: List[List[Generator]]
    i: Dict[int, RatMatrix]
    p: Dict[int, RatMatrix]
    h: Dict[int, RatMatrix]
    d_C: Dict[int, RatMatrix]
    contraction: Contraction
    class_blocks: Dict[tuple, dict] = field(default_factory=dict, repr=False)

    @property
    def length(self) -> int:
        return self.big.length


def _zero(r, c):
    return RatMatrix.zeros(r, c)


def _embed(size_r, size_c, blocks):
    """Assemble a dense matrix from ``(row positions, col positions, block)`` pieces."""
    M = [[Fraction(0)] * size_c for _ in range(size_r)]
    for rows, cols, blk in blocks:
        for a, r in enumerate(rows):
            for b, c in enumerate(cols):
                if blk[a, b]:
                    M[r][c] = blk[a, b]
    return RatMatrix(M, size_r, size_c)


def _image_basis(pi: RatMatrix) -> list:
    _, pivots = rref(pi)
    return [pi.column(j) for j in pivots]


def _check(cond, what, witness=""):
    if not cond:
        raise InvalidContraction(f"SDR axiom failed: {what}{witness}")


def build_base_sdr(C: LineBundleComplex, grading: Grading,
                   contraction: Optional[Contraction] = None,
                   harmonic: Optional[Mapping[tuple, Sequence]] = None) -> SDRDatum:
    """SDR of the associated graded complex onto its homology (zero differential).

    ``harmonic`` optionally maps ``(class, degree)`` to representative vectors
    in class-local coordinates; they must span the image of ``pi = id + dh + hd``.
    """
    k = C.length
    contraction = contraction or mp_contraction(grading, k)
    harmonic = harmonic or {}
    betti = betti_table(grading)
    sizes = [len(t) for t in C.terms]
    small: List[List[Generator]] = [[] for _ in range(k + 1)]
    i_parts = {d: [] for d in range(k + 1)}
    p_parts = {d: [] for d in range(k + 1)}
    h_parts = {d: [] for d in range(k)}
    class_blocks = {}
    for B in grading.complexes:
        rep = C.strat.cells[min(c for cells in B.cells.values() for c in cells)].ceiling
        label = grading.label(B.class_id)
        for d in range(k + 1):
            m = B.size(d)
            h_up = contraction.block(B, d)
            h_down = contraction.block(B, d - 1) if d > 0 else _zero(m, 0)
            if h_up.shape != (B.size(d + 1), m) or h_down.shape != (m, B.size(d - 1) if d else 0):
                raise InvalidContraction(f"homotopy block of class {label} in degree {d} "
                                         f"has the wrong shape")
            pi = RatMatrix.identity(m) + B.d(d + 1) @ h_up + h_down @ B.d(d)
            beta = betti[(d, B.class_id)]
            if contraction.provenance != MOORE_PENROSE:
                h_next = contraction.block(B, d + 1)
                where = f" (class {label}, degree {d})"
                _check((h_next @ h_up).is_zero(), "h^2 = 0", where)
                _check((h_up @ pi).is_zero(), "h pi = 0", where)
                _check((pi @ h_down).is_zero(), "pi h = 0", where)
                _check((pi @ pi) == pi, "pi^2 = pi", where)
                _check((B.d(d) @ pi).is_zero() if d else True, "d pi = 0", where)
                _check(rank(pi) == beta, f"rank pi = betti number {beta}", where)
            key = (B.class_id, d)
            if key in harmonic:
                basis = [tuple(Fraction(x) for x in v) for v in harmonic[key]]
                if contraction.provenance == MOORE_PENROSE:
                    basis = harmonic_basis(B, d, basis)
                for v in basis:
                    if len(v) != m or pi.apply(v) != v:
                        raise BadUserBasis(f"vector {[str(x) for x in v]} is not in the "
                                           f"image of the projector (class {label}, degree {d})")
                if len(basis) != beta or (basis and rank(RatMatrix(basis)) < beta):
                    raise BadUserBasis(f"need {beta} independent representatives for "
                                       f"class {label} in degree {d}")
            elif contraction.provenance == MOORE_PENROSE:
                basis = harmonic_basis(B, d)
            else:
                basis = _image_basis(pi)
            if basis:
                I = RatMatrix.from_columns(basis, m)
                P = inverse(I.T @ I) @ I.T @ pi
            else:
                I, P = _zero(m, 0), _zero(0, m)
            start = len(small[d])
            for j in range(len(basis)):
                small[d].append(Generator(f"H{d}{label}#{j + 1}", rep, None, B.class_id))
            hpos = list(range(start, start + len(basis)))
            i_parts[d].append((B.positions[d], hpos, I))
            p_parts[d].append((hpos, B.positions[d], P))
            if d < k:
                h_parts[d].append((B.positions[d + 1], B.positions[d], h_up))
            class_blocks[key] = {"i": I, "p": P, "h": h_up, "pi": pi}
    hs = [len(t) for t in small]
    i_map = {d: _embed(sizes[d], hs[d], i_parts[d]) for d in range(k + 1)}
    p_map = {d: _embed(hs[d], sizes[d], p_parts[d]) for d in range(k + 1)}
    h_map = {d: _embed(sizes[d + 1], sizes[d], h_parts[d]) for d in range(k)}
    d_C = {d: constant_part(C.differential(d)) for d in range(1, k + 1)}
    S = SDRDatum(C.n, C, small, i_map, p_map, h_map, d_C, contraction, class_blocks)
    check_base_sdr(S)
    return S


def check_base_sdr(S: SDRDatum) -> None:
    """The five SDR axioms plus ``d i = 0`` and ``p d = 0`` (zero small differential)."""
    k = S.length
    sizes = [len(t) for t in S.big.terms]

    def h(d):
        if 0 <= d < k:
            return S.h[d]
        return _zero(sizes[d + 1] if d + 1 <= k else 0, sizes[d] if 0 <= d <= k else 0)

    def dC(d):
        if 1 <= d <= k:
            return S.d_C[d]
        return _zero(sizes[d - 1] if d >= 1 else 0, sizes[d] if d <= k else 0)

    for d in range(k + 1):
        where = f" in degree {d}"
        _check(S.p[d] @ S.i[d] == RatMatrix.identity(len(S.small[d])), "p i = id", where)
        lhs = S.i[d] @ S.p[d]
        rhs = RatMatrix.identity(sizes[d])
        if d < k:
            rhs = rhs + dC(d + 1) @ h(d)
        if d > 0:
            rhs = rhs + h(d - 1) @ dC(d)
        _check(lhs == rhs, "i p = id + d h + h d", where)
        if d + 1 < k:
            _check((h(d + 1) @ h(d)).is_zero(), "h^2 = 0", where)
        if d < k:
            _check((h(d) @ S.i[d]).is_zero(), "h i = 0", where)
            _check((S.p[d + 1] @ h(d)).is_zero(), "p h = 0", where)
        if d > 0:
            _check((dC(d) @ S.i[d]).is_zero(), "d i = 0", where)
            _check((S.p[d - 1] @ dC(d)).is_zero(), "p d = 0", where)


@dataclass
class Perturbed:
    sigma: Dict[int, PolyMatrix]
    delta: Dict[int, PolyMatrix]
    d_min: Dict[int, PolyMatrix]
    i_inf: Dict[int, PolyMatrix]
    p_inf: Dict[int, PolyMatrix]
    h_inf: Dict[int, PolyMatrix]
    iterations: Dict[int, int]


def _poly(M: RatMatrix, n: int) -> PolyMatrix:
    return PolyMatrix.from_rat(M, n)


def perturbation_of(C: LineBundleComplex) -> Dict[int, PolyMatrix]:
    """``delta = d - gr d``: the non-constant part of each differential."""
    out = {}
    for d in range(1, C.length + 1):
        M = C.differential(d)
        out[d] = M - PolyMatrix.from_rat(constant_part(M), C.n)
    return out


def perturb(S: SDRDatum, delta: Mapping[int, PolyMatrix], bound: Optional[int] = None) -> Perturbed:
    """Sum ``sigma = delta (h delta)^j`` until it stops, then transfer i, p, h, d."""
    n, k = S.n, S.length
    if bound is None:
        bound = _grade_count(S) + 1
    sigma, iterations = {}, {}
    for d in range(1, k + 1):
        loop = _poly(S.h[d - 1], n) @ delta[d]
        term = delta[d]
        total = PolyMatrix.zeros(term.rows, term.cols, n)
        steps = 0
        while not term.is_zero():
            if steps > bound:
                raise NonNilpotent(f"h delta not nilpotent within {bound} steps in degree {d}")
            total = total + term
            term = term @ loop
            steps += 1
        sigma[d] = total
        iterations[d] = steps
    I = {d: _poly(S.i[d], n) for d in range(k + 1)}
    P = {d: _poly(S.p[d], n) for d in range(k + 1)}
    H = {d: _poly(S.h[d], n) for d in range(k)}
    d_min = {d: P[d - 1] @ sigma[d] @ I[d] for d in range(1, k + 1)}
    i_inf = {d: I[d] + (H[d - 1] @ sigma[d] @ I[d] if d > 0 else
                        PolyMatrix.zeros(I[d].rows, I[d].cols, n)) for d in range(k + 1)}
    p_inf = {d: P[d] + (P[d] @ sigma[d + 1] @ H[d] if d < k else
                        PolyMatrix.zeros(P[d].rows, P[d].cols, n)) for d in range(k + 1)}
    h_inf = {d: H[d] + H[d] @ sigma[d + 1] @ H[d] for d in range(k)}
    return Perturbed(sigma, dict(delta), d_min, i_inf, p_inf, h_inf, iterations)


def _grade_count(S: SDRDatum) -> int:
    return len({g.class_id for t in S.big.terms for g in t}) or len(S.class_blocks)


def _fail(name, d, M: PolyMatrix, names):
    (r, c), p = min(M.entries.items())
    raise IdentityFailure(f"identity {name} fails in degree {d} at entry ({r}, {c}): "
                          f"residual {p.to_text(names)}", name, d, (r, c))


def verify_sdr_perturbed(C: LineBundleComplex, S: SDRDatum, P: Perturbed) -> dict:
    """Check the perturbed datum is again an SDR onto ``(H, d_min)``, symbolically."""
    n, k = C.n, C.length
    names = C.names
    sizes = [len(t) for t in C.terms]
    hs = [len(t) for t in S.small]

    def zero(r, c):
        return PolyMatrix.zeros(r, c, n)

    def d(i):
        return C.differential(i) if 1 <= i <= k else zero(sizes[i - 1] if i >= 1 else 0,
                                                          sizes[i] if i <= k else 0)

    def dm(i):
        return P.d_min[i] if 1 <= i <= k else zero(hs[i - 1] if i >= 1 else 0,
                                                   hs[i] if i <= k else 0)

    def hi(i):
        return P.h_inf[i] if 0 <= i < k else zero(sizes[i + 1] if i + 1 <= k else 0,
                                                  sizes[i] if i >= 0 else 0)

    report = {}

    def expect_zero(name, i, M):
        if not M.is_zero():
            _fail(name, i, M, names)
        report.setdefault(name, []).append(i)

    for i in range(k + 1):
        expect_zero("p_inf i_inf = id", i,
                    P.p_inf[i] @ P.i_inf[i] - PolyMatrix.identity(hs[i], n))
        rhs = PolyMatrix.identity(sizes[i], n)
        if i < k:
            rhs = rhs + d(i + 1) @ hi(i)
        if i > 0:
            rhs = rhs + hi(i - 1) @ d(i)
        expect_zero("i_inf p_inf = id + d h_inf + h_inf d", i, P.i_inf[i] @ P.p_inf[i] - rhs)
        if i + 1 < k:
            expect_zero("h_inf^2 = 0", i, hi(i + 1) @ hi(i))
        if i < k:
            expect_zero("h_inf i_inf = 0", i, hi(i) @ P.i_inf[i])
            expect_zero("p_inf h_inf = 0", i, P.p_inf[i + 1] @ hi(i))
        if i > 0:
            expect_zero("i_inf d_min = d i_inf", i, P.i_inf[i - 1] @ dm(i) - d(i) @ P.i_inf[i])
            expect_zero("p_inf d = d_min p_inf", i, P.p_inf[i - 1] @ d(i) - dm(i) @ P.p_inf[i])
        if i > 1:
            expect_zero("d_min^2 = 0", i, dm(i - 1) @ dm(i))
    return {name: sorted(set(v)) for name, v in report.items()}


def verify_series_identities(S: SDRDatum, P: Perturbed) -> dict:
    """``delta h sigma = sigma h delta = sigma - delta`` and
    ``sigma i p sigma + sigma d0 + d0 sigma = 0`` with ``d0`` the graded differential."""
    n, k = S.n, S.length
    names = S.big.names
    report = {}
    for d in range(1, k + 1):
        H = _poly(S.h[d - 1], n)
        sig, dl = P.sigma[d], P.delta[d]
        for name, M in (("delta h sigma = sigma - delta", dl @ H @ sig - (sig - dl)),
                        ("sigma h delta = sigma - delta", sig @ H @ dl - (sig - dl))):
            if not M.is_zero():
                _fail(name, d, M, names)
            report.setdefault(name, []).append(d)
    for d in range(2, k + 1):
        ip = _poly(S.i[d - 1] @ S.p[d - 1], n)
        d0_hi = _poly(S.d_C[d], n)
        d0_lo = _poly(S.d_C[d - 1], n)
        M = P.sigma[d - 1] @ ip @ P.sigma[d] + P.sigma[d - 1] @ d0_hi + d0_lo @ P.sigma[d]
        name = "sigma i p sigma + sigma d0 + d0 sigma = 0"
        if not M.is_zero():
            _fail(name, d, M, names)
        report.setdefault(name, []).append(d)
    return report


def verify_minimality(d_min) -> bool:
    """True iff no entry of any differential has a nonzero constant term."""
    mats = d_min.values() if isinstance(d_min, Mapping) else (
        d_min.d.values() if isinstance(d_min, LineBundleComplex) else [d_min])
    return all(p.constant_term() == 0 for M in mats for p in M.entries.values())


@dataclass
class Resolution:
    """Everything produced by :func:`minimal_resolution`."""
    quadruple: Quadruple
    strat: Stratification
    hhl: LineBundleComplex
    grading: Grading
    sdr: SDRDatum
    perturbed: Perturbed
    complex: LineBundleComplex
    betti: Dict[tuple, int]
    checks: dict = field(default_factory=dict)


def harmonic_from_cells(C: LineBundleComplex, grading: Grading,
                        vectors: Sequence[Mapping[str, object]]) -> Dict[tuple, list]:
    """Convert vectors keyed by cell name into class-local coordinates."""
    out: Dict[tuple, list] = {}
    for vec in vectors:
        if not vec:
            raise BadUserBasis("empty harmonic vector")
        cells = []
        for name in vec:
            try:
                cells.append(C.strat.by_name(name))
            except KeyError:
                raise BadUserBasis(f"unknown cell {name!r} in harmonic vector") from None
        keys = {(grading.cell_class[c.id], c.dim) for c in cells}
        if len(keys) != 1:
            raise BadUserBasis("a harmonic vector must live in one class and one degree")
        key = keys.pop()
        B = grading.bm(key[0])
        v = [Fraction(0)] * B.size(key[1])
        for c in cells:
            v[B.cells[key[1]].index(c.id)] = Fraction(vec[c.name])
        out.setdefault(key, []).append(v)
    return out


def minimal_resolution(q: Quadruple, contraction=None, harmonic=None, verify: bool = True,
                       strat: Optional[Stratification] = None) -> Resolution:
    """Drive the whole pipeline: cells, cellular complex, grading, SDR, perturbation.

    ``contraction``: None (Moore-Penrose), a :class:`Contraction`, or a callable
    ``(hhl, grading) -> Contraction``.  ``harmonic``: None, a mapping
    ``(class, degree) -> vectors``, or a list of cell-name keyed vectors.
    """
    strat = strat or enumerate_cells(q)
    C = build_hhl_complex(q, strat)
    verify_complex(C)
    theta = find_positive_grading(C)
    grading = build_bm_complexes(C, theta)
    if callable(contraction):
        contraction = contraction(C, grading)
    if harmonic is not None and not isinstance(harmonic, Mapping):
        harmonic = harmonic_from_cells(C, grading, harmonic)
    S = build_base_sdr(C, grading, contraction, harmonic)
    bound = len({grading.grade[c] for c in grading.order}) + 1
    P = perturb(S, perturbation_of(C), bound=bound)
    out = LineBundleComplex(q.n, [list(t) for t in S.small], dict(P.d_min), C.names, strat)
    checks = {}
    prod = verify_complex(out)
    checks["d_min^2 = 0"] = prod["checked_degrees"]
    if not verify_minimality(P.d_min):
        raise NotMinimal("minimal differential has a unit entry")
    checks["minimal"] = True
    betti = betti_table(grading)
    if out.ranks() != tuple(sum(b for (i, _), b in betti.items() if i == d)
                            for d in range(q.k + 1)):
        raise NotMinimal("output ranks disagree with the Betti table")
    if verify:
        checks["sdr"] = verify_sdr_perturbed(C, S, P)
        checks["series"] = verify_series_identities(S, P)
    return Resolution(q, strat, C, grading, S, P, out, betti, checks)
