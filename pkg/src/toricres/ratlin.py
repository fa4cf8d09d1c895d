"""Exact rational linear algebra.

Matrices are immutable grids of :class:`fractions.Fraction`.  Nothing in this
module (or anywhere else in the package) touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Optional, Sequence


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floating point input is not allowed")
    return Fraction(x)


class RatMatrix:
    """Dense immutable rational matrix."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, entries: Iterable[Iterable] = (), rows: Optional[int] = None,
                 cols: Optional[int] = None):
        data = tuple(tuple(_frac(x) for x in row) for row in entries)
        if rows is None:
            rows = len(data)
        if cols is None:
            cols = len(data[0]) if data else 0
        if len(data) != rows or any(len(r) != cols for r in data):
            raise ValueError(f"entry grid does not match shape {rows}x{cols}")
        self.rows = rows
        self.cols = cols
        self.data = data

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RatMatrix":
        return cls([[0] * cols for _ in range(rows)], rows, cols)

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n, n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int) -> "RatMatrix":
        return cls([[c[i] for c in columns] for i in range(rows)], rows, len(columns))

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, idx):
        i, j = idx
        return self.data[i][j]

    def row(self, i):
        return self.data[i]

    def column(self, j):
        return tuple(r[j] for r in self.data)

    def tolist(self):
        return [list(r) for r in self.data]

    @property
    def T(self) -> "RatMatrix":
        return RatMatrix([[self.data[i][j] for i in range(self.rows)]
                          for j in range(self.cols)], self.cols, self.rows)

    def __eq__(self, other):
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return self.shape == other.shape and self.data == other.data

    def __hash__(self):
        return hash((self.rows, self.cols, self.data))

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in r) for r in self.data)
        return f"RatMatrix({self.rows}x{self.cols}: [{body}])"

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        return RatMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.data, other.data)],
                         self.rows, self.cols)

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} - {other.shape}")
        return RatMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.data, other.data)],
                         self.rows, self.cols)

    def __neg__(self) -> "RatMatrix":
        return RatMatrix([[-a for a in r] for r in self.data], self.rows, self.cols)

    def scale(self, c) -> "RatMatrix":
        c = _frac(c)
        return RatMatrix([[c * a for a in r] for r in self.data], self.rows, self.cols)

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = other.T.data
        out = []
        for r in self.data:
            nz = [(k, a) for k, a in enumerate(r) if a]
            out.append([sum((a * c[k] for k, a in nz), Fraction(0)) for c in cols])
        return RatMatrix(out, self.rows, other.cols)

    def apply(self, v: Sequence) -> tuple:
        return tuple(sum((a * _frac(x) for a, x in zip(r, v)), Fraction(0)) for r in self.data)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "RatMatrix":
        return RatMatrix([[self.data[i][j] for j in cols] for i in rows], len(rows), len(cols))

    def is_zero(self) -> bool:
        return all(a == 0 for r in self.data for a in r)

    def vstack(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.cols:
            raise ValueError("column counts differ")
        return RatMatrix(self.data + other.data, self.rows + other.rows, self.cols)


def rref(M: RatMatrix):
    """Reduced row echelon form and the (strictly increasing) pivot columns.

    Pivoting is deterministic: leftmost column, first nonzero row.
    """
    A = [list(r) for r in M.data]
    pivots = []
    r = 0
    for c in range(M.cols):
        if r == M.rows:
            break
        p = next((i for i in range(r, M.rows) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(M.rows):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    return RatMatrix(A, M.rows, M.cols), pivots


def rank(M: RatMatrix) -> int:
    return len(rref(M)[1])


def kernel_basis(M: RatMatrix) -> list:
    """Right kernel basis, one vector per free column of the RREF (in column order)."""
    R, pivots = rref(M)
    free = [c for c in range(M.cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * M.cols
        v[f] = Fraction(1)
        for row, p in enumerate(pivots):
            v[p] = -R[row, f]
        basis.append(tuple(v))
    return basis


def solve(A: RatMatrix, b: Sequence):
    """One exact solution of ``A x = b`` (free variables set to zero), or ``None``."""
    aug = RatMatrix([list(r) + [_frac(x)] for r, x in zip(A.data, b)], A.rows, A.cols + 1)
    R, pivots = rref(aug)
    if pivots and pivots[-1] == A.cols:
        return None
    x = [Fraction(0)] * A.cols
    for row, p in enumerate(pivots):
        x[p] = R[row, A.cols]
    return tuple(x)


def inverse(M: RatMatrix) -> RatMatrix:
    if M.rows != M.cols:
        raise ValueError("inverse of a non-square matrix")
    n = M.rows
    aug = RatMatrix([list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(M.data)],
                    n, 2 * n)
    R, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return R.submatrix(range(n), range(n, 2 * n))


def det(M: RatMatrix) -> Fraction:
    if M.rows != M.cols:
        raise ValueError("determinant of a non-square matrix")
    A = [list(r) for r in M.data]
    n = M.rows
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if A[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            d = -d
        d *= A[c][c]
        for i in range(c + 1, n):
            if A[i][c]:
                f = A[i][c] / A[c][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[c])]
    return d


# -- integer normal forms ---------------------------------------------------

def _int_matrix(M) -> list:
    rows = M.tolist() if isinstance(M, RatMatrix) else [list(r) for r in M]
    out = []
    for r in rows:
        row = []
        for x in r:
            x = _frac(x)
            if x.denominator != 1:
                raise ValueError("integer matrix expected")
            row.append(int(x))
        out.append(row)
    return out


def _ident(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _imatmul(A, B):
    if not A:
        return []
    m = len(B[0]) if B else 0
    return [[sum(a * B[k][j] for k, a in enumerate(r)) for j in range(m)] for r in A]


def hermite_column(M):
    """Column-style Hermite normal form ``H = M V`` with ``V`` unimodular.

    ``H`` is lower-triangular in echelon sense: each pivot row has a positive
    pivot, and entries to the left of a pivot in its row are reduced into
    ``[0, pivot)``.  Returns ``(H, V)`` as integer lists.
    """
    A = _int_matrix(M)
    m = len(A)
    n = len(A[0]) if A else 0
    V = _ident(n)

    def colop(i, j, a, b, c, d):
        # (col_i, col_j) <- (a col_i + b col_j, c col_i + d col_j)
        for R in (A, V):
            for r in R:
                x, y = r[i], r[j]
                r[i], r[j] = a * x + b * y, c * x + d * y

    col = 0
    pivot_rows = []
    for row in range(m):
        if col == n:
            break
        for j in range(col + 1, n):
            if A[row][j] == 0:
                continue
            a, b = A[row][col], A[row][j]
            x, y, g = xgcd(a, b)
            # new col = x*c_col + y*c_j has g; other = -b/g c_col + a/g c_j has 0
            colop(col, j, x, y, -b // g, a // g)
        if A[row][col] == 0:
            continue
        if A[row][col] < 0:
            for R in (A, V):
                for r in R:
                    r[col] = -r[col]
        p = A[row][col]
        for j in range(col):
            q = A[row][j] // p
            if q:
                colop(j, col, 1, -q, 0, 1)
        pivot_rows.append(row)
        col += 1
    return A, V


def xgcd(a: int, b: int):
    """Return ``(x, y, g)`` with ``x*a + y*b == g == gcd(a, b) >= 0``."""
    x, nx = 1, 0
    y, ny = 0, 1
    g, ng = a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    if g < 0:
        x, y, g = -x, -y, -g
    return x, y, g


@dataclass(frozen=True)
class SmithForm:
    """``U @ M @ V == D`` with ``U``, ``V`` unimodular and ``D`` diagonal.

    The diagonal entries are nonnegative and each divides the next.
    """
    U: tuple
    D: tuple
    V: tuple
    U_inv: tuple
    V_inv: tuple

    @property
    def invariant_factors(self) -> list:
        k = min(len(self.D), len(self.D[0]) if self.D else 0)
        return [self.D[i][i] for i in range(k) if self.D[i][i] != 0]


def smith(M) -> SmithForm:
    A = _int_matrix(M)
    m = len(A)
    n = len(A[0]) if A else 0
    U, Ui = _ident(m), _ident(m)
    V, Vi = _ident(n), _ident(n)

    def rowop(i, j, a, b, c, d):
        # rows (i, j) <- [[a, b], [c, d]] @ rows (i, j); det = 1
        for R in (A, U):
            ri, rj = R[i], R[j]
            R[i] = [a * x + b * y for x, y in zip(ri, rj)]
            R[j] = [c * x + d * y for x, y in zip(ri, rj)]
        # inverse acts on columns of U^{-1}
        for r in Ui:
            x, y = r[i], r[j]
            r[i], r[j] = d * x - c * y, -b * x + a * y

    def colop(i, j, a, b, c, d):
        # cols (i, j) <- (a col_i + b col_j, c col_i + d col_j); det = a*d - b*c = 1
        for R in (A, V):
            for r in R:
                x, y = r[i], r[j]
                r[i], r[j] = a * x + b * y, c * x + d * y
        # V^{-1}: rows (i, j) transform by the inverse of [[a, c], [b, d]]
        ri, rj = Vi[i], Vi[j]
        Vi[i] = [d * x - c * y for x, y in zip(ri, rj)]
        Vi[j] = [-b * x + a * y for x, y in zip(ri, rj)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]
        for r in Ui:
            r[i], r[j] = r[j], r[i]

    def swap_cols(i, j):
        for R in (A, V):
            for r in R:
                r[i], r[j] = r[j], r[i]
        Vi[i], Vi[j] = Vi[j], Vi[i]

    def negate_row(i):
        A[i] = [-x for x in A[i]]
        U[i] = [-x for x in U[i]]
        for r in Ui:
            r[i] = -r[i]

    t = 0
    while t < min(m, n):
        nz = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
        if not nz:
            break
        _, pi, pj = min(nz)
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            done = True
            for i in range(t + 1, m):
                if A[i][t]:
                    a, b = A[t][t], A[i][t]
                    if b % a == 0:
                        rowop(t, i, 1, 0, -(b // a), 1)
                    else:
                        x, y, g = xgcd(a, b)
                        rowop(t, i, x, y, -b // g, a // g)
                    done = False
            for j in range(t + 1, n):
                if A[t][j]:
                    a, b = A[t][t], A[t][j]
                    if b % a == 0:
                        colop(t, j, 1, 0, -(b // a), 1)
                    else:
                        x, y, g = xgcd(a, b)
                        colop(t, j, x, y, -b // g, a // g)
                    done = False
            if done:
                # divisibility: fold any offending entry into row t and repeat
                p = A[t][t]
                bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                            if A[i][j] % p), None)
                if bad is None:
                    break
                rowop(t, bad[0], 1, 1, 0, 1)
        if A[t][t] < 0:
            negate_row(t)
        t += 1
    return SmithForm(tuple(map(tuple, U)), tuple(map(tuple, A)), tuple(map(tuple, V)),
                     tuple(map(tuple, Ui)), tuple(map(tuple, Vi)))


def hermite_and_smith(M):
    """Column Hermite form and Smith form of an integer matrix."""
    H, V = hermite_column(M)
    return (tuple(map(tuple, H)), tuple(map(tuple, V))), smith(M)


def int_det(M) -> int:
    return int(det(RatMatrix(M))) if M else 1


# -- strict feasibility -----------------------------------------------------

@dataclass(frozen=True)
class StrictSystem:
    """Constraints on a point of Q^dim.

    ``equalities``: ``(c, b)`` meaning ``c.x == b``.
    ``strict``: ``(c, lo, hi)`` meaning ``lo < c.x < hi`` (either bound may be None).
    ``closed``: ``(c, lo, hi)`` meaning ``lo <= c.x <= hi``.
    """
    dim: int
    equalities: tuple = ()
    strict: tuple = ()
    closed: tuple = field(default=())

    def __post_init__(self):
        for c, *_ in self.equalities + self.strict + self.closed:
            if len(c) != self.dim:
                raise ValueError("constraint vector has the wrong ambient dimension")

    def satisfied_by(self, x) -> bool:
        def dot(c):
            return sum((_frac(a) * b for a, b in zip(c, x)), Fraction(0))
        for c, b in self.equalities:
            if dot(c) != b:
                return False
        for c, lo, hi in self.strict:
            v = dot(c)
            if (lo is not None and not lo < v) or (hi is not None and not v < hi):
                return False
        for c, lo, hi in self.closed:
            v = dot(c)
            if (lo is not None and not lo <= v) or (hi is not None and not v <= hi):
                return False
        return True


def _normalize(coeffs, const, strict):
    # scale so that the first nonzero coefficient has absolute value 1
    lead = next((abs(c) for c in coeffs if c), None)
    if lead is None:
        return tuple(coeffs), const, strict
    return tuple(c / lead for c in coeffs), const / lead, strict


def _integral(coeffs, b):
    """Scale ``(coeffs, b)`` to coprime integers (positive factor)."""
    den = 1
    for x in (*coeffs, b):
        den = den * x.denominator // gcd(den, x.denominator)
    row = [int(x * den) for x in (*coeffs, b)]
    g = 0
    for x in row:
        g = gcd(g, x)
    return tuple(x // g for x in row) if g else tuple(row)


def _tighten(rows, store):
    """Keep the tightest bound per coefficient vector: ``c.t > b`` beats ``c.t >= b``."""
    for row, s in rows:
        c, b = row[:-1], row[-1]
        old = store.get(c)
        if old is None or b > old[0] or (b == old[0] and s and not old[1]):
            store[c] = (b, s)


def _fm_point(ineqs, dim):
    """Fourier-Motzkin with midpoint back-substitution.

    ``ineqs`` are triples ``(coeffs, b, strict)`` meaning ``coeffs.t > b``
    (strict) or ``>= b``.  Elimination runs on coprime integer rows.
    Returns a point or ``None``.
    """
    store = {}
    zero_rows = []
    rows = []
    for c, b, s in ineqs:
        row = _integral([_frac(x) for x in c], _frac(b))
        if any(row[:-1]):
            rows.append((row, s))
        else:
            zero_rows.append((row[-1], s))
    for b, s in zero_rows:
        if (s and not 0 > b) or (not s and not 0 >= b):
            return None
    _tighten(rows, store)
    stages = []
    for var in range(dim - 1, -1, -1):
        stages.append(store)
        pos, neg, rest = [], [], {}
        for c, (b, s) in store.items():
            if c[var] > 0:
                pos.append((c, b, s))
            elif c[var] < 0:
                neg.append((c, b, s))
            else:
                rest[c] = (b, s)
        new_rows = []
        for cp, bp, sp in pos:
            for cn, bn, sn in neg:
                fp, fn = -cn[var], cp[var]
                coeffs = [fp * a + fn * b for a, b in zip(cp, cn)]
                bb = fp * bp + fn * bn
                g = 0
                for x in coeffs:
                    g = gcd(g, x)
                if g == 0:
                    if (sp or sn) and not 0 > bb or not (sp or sn) and not 0 >= bb:
                        return None
                    continue
                g = gcd(g, bb)
                new_rows.append((tuple(x // g for x in coeffs) + (bb // g,), sp or sn))
        _tighten(new_rows, rest)
        store = rest
    point = [Fraction(0)] * dim
    for var, system in zip(range(dim), reversed(stages)):
        lo = hi = None
        lo_s = hi_s = False
        for c, (b, s) in system.items():
            a = c[var]
            if a == 0 or any(c[var + 1:]):
                continue
            rest = sum((c[j] * point[j] for j in range(var)), Fraction(0))
            bound = (b - rest) / a
            if a > 0:
                if lo is None or bound > lo or (bound == lo and s):
                    lo, lo_s = bound, s
            else:
                if hi is None or bound < hi or (bound == hi and s):
                    hi, hi_s = bound, s
        if lo is not None and hi is not None:
            if lo > hi or (lo == hi and (lo_s or hi_s)):
                return None
            point[var] = (lo + hi) / 2
        elif lo is not None:
            point[var] = lo + 1 if lo_s else lo
        elif hi is not None:
            point[var] = hi - 1 if hi_s else hi
    return tuple(point)


@lru_cache(maxsize=4096)
def _affine_param(dim, rows, rhs):
    """Particular solution and kernel basis of ``rows x = rhs`` (None if inconsistent)."""
    if not rows:
        x0 = (Fraction(0),) * dim
        return x0, tuple(tuple(Fraction(int(i == j)) for j in range(dim)) for i in range(dim))
    A = RatMatrix(rows, len(rows), dim)
    x0 = solve(A, rhs)
    if x0 is None:
        return None
    return x0, tuple(kernel_basis(A))


def feasible_interior_point(S: StrictSystem):
    """Exact point satisfying every constraint of ``S``, or ``None`` if infeasible.

    The equalities are solved first and the remaining constraints are pulled
    back to the affine parametrisation, which is then handled by
    Fourier-Motzkin elimination.
    """
    dim = S.dim
    param = _affine_param(dim, tuple(tuple(_frac(a) for a in c) for c, _ in S.equalities),
                          tuple(_frac(b) for _, b in S.equalities))
    if param is None:
        return None
    x0, N = param
    p = len(N)

    def pull(c):
        c = [_frac(a) for a in c]
        coeffs = tuple(sum((a * v[i] for i, a in enumerate(c)), Fraction(0)) for v in N)
        offset = sum((a * x for a, x in zip(c, x0)), Fraction(0))
        return coeffs, offset

    ineqs = set()
    for group, strict in ((S.strict, True), (S.closed, False)):
        for c, lo, hi in group:
            coeffs, off = pull(c)
            if lo is not None:
                ineqs.add(_normalize(coeffs, _frac(lo) - off, strict))
            if hi is not None:
                ineqs.add(_normalize(tuple(-a for a in coeffs), off - _frac(hi), strict))
    t = _fm_point(ineqs, p)
    if t is None:
        return None
    x = tuple(x0[i] + sum((t[j] * N[j][i] for j in range(p)), Fraction(0)) for i in range(dim))
    assert S.satisfied_by(x)
    return x


def primitive_integer(v: Sequence) -> tuple:
    """Scale a rational vector to the primitive integer vector on the same ray."""
    v = [_frac(x) for x in v]
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    w = [int(x * den) for x in v]
    g = 0
    for x in w:
        g = gcd(g, x)
    return tuple(x // g for x in w) if g else tuple(w)
