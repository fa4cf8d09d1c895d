"""Bundle classes, the positive grading, Borel-Moore blocks and Betti numbers."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from .errors import BadUserBasis, InconsistentGrading, NoPositiveGrading
from .hhl import LineBundleComplex
from .lattice import ClassGroup, ClassId
from .polyring import constant_part
from .ratlin import (RatMatrix, StrictSystem, feasible_interior_point, kernel_basis,
                     primitive_integer, rank)
from .strat import Quadruple


def class_map(a: Sequence[int], q: Quadruple) -> ClassId:
    """Image of ``a`` in Z^n / im(psi^T) (Smith coordinates)."""
    return ClassGroup(q.psi).class_of(a)


def occurring_epsilons(C: LineBundleComplex) -> list:
    eps = set()
    for incs in C.strat.incidences.values():
        for inc in incs:
            if any(inc.epsilon):
                eps.add(inc.epsilon)
    return sorted(eps)


def find_positive_grading(C: LineBundleComplex) -> tuple:
    """Primitive integer ``theta`` with ``psi theta = 0`` and ``theta.eps >= 1`` for all eps.

    Raises :class:`NoPositiveGrading` naming an offending exponent vector when
    no such functional exists.
    """
    q = C.strat.quadruple
    eqs = tuple((row, Fraction(0)) for row in q.psi)
    eps = occurring_epsilons(C)
    system = StrictSystem(q.n, eqs, (), tuple((e, Fraction(1), None) for e in eps))
    theta = feasible_interior_point(system)
    if theta is None:
        names = q.variable_names
        for e in eps:
            alone = StrictSystem(q.n, eqs, (), ((e, Fraction(1), None),))
            if feasible_interior_point(alone) is None:
                mono = "*".join(f"{x}^{k}" if k > 1 else x for x, k in zip(names, e) if k)
                raise NoPositiveGrading(
                    f"no grading vanishing on im(psi^T) is positive on the exponent "
                    f"{list(e)} ({mono}); the filtration is not strictly compatible", e)
        raise NoPositiveGrading(
            f"no grading vanishing on im(psi^T) is positive on all {len(eps)} "
            f"occurring exponents simultaneously", eps[0] if eps else None)
    return primitive_integer(theta)


@dataclass
class BMComplex:
    """Per-class integer chain complex: ``boundary[i]`` maps degree ``i`` to ``i - 1``."""
    class_id: ClassId
    grade: int
    cells: Dict[int, List[int]]
    positions: Dict[int, List[int]]
    boundary: Dict[int, RatMatrix]

    def size(self, i: int) -> int:
        return len(self.cells.get(i, ()))

    def d(self, i: int) -> RatMatrix:
        if i in self.boundary:
            return self.boundary[i]
        return RatMatrix.zeros(self.size(i - 1), self.size(i))


@dataclass
class Grading:
    theta: tuple
    cell_class: Dict[int, ClassId]
    grade: Dict[ClassId, int]
    order: List[ClassId]
    complexes: List[BMComplex] = field(default_factory=list)

    def label(self, cid: ClassId) -> str:
        """Display name: minus the theta-degree, e.g. ``[-4]``."""
        return f"[{-self.grade[cid]}]"

    def bm(self, cid: ClassId) -> BMComplex:
        for B in self.complexes:
            if B.class_id == cid:
                return B
        raise KeyError(cid)


def build_bm_complexes(C: LineBundleComplex, theta: Optional[tuple] = None) -> Grading:
    """Blocks of ``constant_part(d)`` on each class; off-class constants must vanish."""
    q = C.strat.quadruple
    theta = theta if theta is not None else find_positive_grading(C)
    G = ClassGroup(q.psi)
    cell_class = {c.id: G.class_of(c.ceiling) for c in C.strat.cells}
    grade = {}
    for c in C.strat.cells:
        g = sum(t * a for t, a in zip(theta, c.ceiling))
        cid = cell_class[c.id]
        if grade.setdefault(cid, g) != g:
            raise InconsistentGrading(f"class {cid} carries two theta-degrees")
    order = sorted(grade, key=lambda cid: (grade[cid], cid.free, cid.torsion))
    members = {cid: {i: [] for i in range(C.length + 1)} for cid in order}
    positions = {cid: {i: [] for i in range(C.length + 1)} for cid in order}
    for i, term in enumerate(C.terms):
        for j, g in enumerate(term):
            members[cell_class[g.cell]][i].append(g.cell)
            positions[cell_class[g.cell]][i].append(j)
    const = {i: constant_part(C.differential(i)) for i in range(1, C.length + 1)}
    for i, M in const.items():
        for r in range(M.rows):
            for c in range(M.cols):
                if M[r, c] and cell_class[C.terms[i - 1][r].cell] != cell_class[C.terms[i][c].cell]:
                    raise InconsistentGrading(
                        f"constant entry {M[r, c]} of d_{i} at ({C.terms[i - 1][r].name}, "
                        f"{C.terms[i][c].name}) crosses bundle classes")
    complexes = []
    for cid in order:
        pos = positions[cid]
        boundary = {i: const[i].submatrix(pos[i - 1], pos[i]) for i in const}
        complexes.append(BMComplex(cid, grade[cid], members[cid], pos, boundary))
    return Grading(theta, cell_class, grade, order, complexes)


def betti_table(grading: Grading) -> Dict[tuple, int]:
    """``(i, class) -> |cells| - rank d_i - rank d_{i+1}`` for every class and degree."""
    table = {}
    for B in grading.complexes:
        for i in sorted(B.cells):
            table[(i, B.class_id)] = B.size(i) - rank(B.d(i)) - rank(B.d(i + 1))
    return table


def _stack(B: BMComplex, i: int) -> RatMatrix:
    down = B.d(i)
    up_t = B.d(i + 1).T
    return RatMatrix(down.data + up_t.data, down.rows + up_t.rows, B.size(i))


def harmonic_basis(B: BMComplex, i: int, user: Optional[Sequence[Sequence]] = None) -> list:
    """Basis of ``ker d_i  cap  ker d_{i+1}^T``.

    Without ``user`` this is the RREF kernel basis of the stacked matrix.  A
    user basis is accepted if it is harmonic, independent and of full size.
    """
    canonical = kernel_basis(_stack(B, i))
    if user is None:
        return canonical
    vecs = [tuple(Fraction(x) for x in v) for v in user]
    S = _stack(B, i)
    for v in vecs:
        if len(v) != B.size(i):
            raise BadUserBasis(f"harmonic vector {v} has length {len(v)} != {B.size(i)}")
        if any(S.apply(v)):
            raise BadUserBasis(f"vector {[str(x) for x in v]} is not harmonic in degree {i}")
    if vecs and rank(RatMatrix(vecs, len(vecs), B.size(i))) < len(vecs):
        raise BadUserBasis("supplied harmonic vectors are linearly dependent")
    if len(vecs) != len(canonical):
        raise BadUserBasis(f"expected {len(canonical)} harmonic vectors in degree {i}, "
                           f"got {len(vecs)}")
    return vecs
