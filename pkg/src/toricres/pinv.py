"""Exact Moore-Penrose inverses.

``mp_inverse`` is the production path (rank factorisation).  The hedge sum
and the per-entry minor formula are independent oracles used in tests; they
enumerate all pairs of row/column subsets and are exponential in size.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterator, Tuple

from .errors import TooLarge
from .ratlin import RatMatrix, det, inverse, rref

HEDGE_BOUND = (8, 8)


@dataclass(frozen=True)
class Hedge:
    S: tuple  # stake set: row indices
    T: tuple  # shrubbery: column indices
    minor: Fraction


def mp_inverse(A: RatMatrix) -> RatMatrix:
    """``A+ = C^T (C C^T)^-1 (B^T B)^-1 B^T`` for ``A = B C`` (pivot columns times RREF rows)."""
    R, pivots = rref(A)
    r = len(pivots)
    if r == 0:
        return RatMatrix.zeros(A.cols, A.rows)
    B = A.submatrix(range(A.rows), pivots)
    C = R.submatrix(range(r), range(A.cols))
    return C.T @ inverse(C @ C.T) @ inverse(B.T @ B) @ B.T


def _check_bound(A: RatMatrix, bound):
    bound = bound or HEDGE_BOUND
    if A.rows > bound[0] or A.cols > bound[1]:
        raise TooLarge(f"hedge enumeration limited to {bound[0]}x{bound[1]}, got {A.shape}")


def hedges(A: RatMatrix) -> Iterator[Hedge]:
    r = len(rref(A)[1])
    for S in combinations(range(A.rows), r):
        for T in combinations(range(A.cols), r):
            m = det(A.submatrix(S, T)) if r else Fraction(1)
            if m:
                yield Hedge(S, T, m)


def hedge_splitting(A: RatMatrix, h: Hedge) -> RatMatrix:
    """Zero on rows outside ``S``; sends ``A e_t`` back to ``e_t`` for ``t`` in ``T``."""
    out = [[Fraction(0)] * A.rows for _ in range(A.cols)]
    if h.S:
        inv = inverse(A.submatrix(h.S, h.T))
        for a, t in enumerate(h.T):
            for b, s in enumerate(h.S):
                out[t][s] = inv[a, b]
    return RatMatrix(out, A.cols, A.rows)


def mp_inverse_hedge(A: RatMatrix, bound=None) -> RatMatrix:
    """Average of hedge splittings weighted by squared minors."""
    _check_bound(A, bound)
    total = RatMatrix.zeros(A.cols, A.rows)
    delta = Fraction(0)
    for h in hedges(A):
        w = h.minor * h.minor
        delta += w
        total = total + hedge_splitting(A, h).scale(w)
    if delta == 0:
        return total
    return total.scale(1 / delta)


def mp_entry(A: RatMatrix, i: int, j: int, bound=None) -> Fraction:
    """Entry ``(i, j)`` of ``A+`` from signed products of minors over hedges with
    ``j`` in the stake set and ``i`` in the shrubbery."""
    _check_bound(A, bound)
    delta = Fraction(0)
    acc = Fraction(0)
    for h in hedges(A):
        delta += h.minor * h.minor
        if j in h.S and i in h.T:
            a = h.T.index(i)
            b = h.S.index(j)
            S2 = tuple(s for s in h.S if s != j)
            T2 = tuple(t for t in h.T if t != i)
            sub = det(A.submatrix(S2, T2)) if S2 else Fraction(1)
            acc += (-1) ** (a + b) * h.minor * sub
    return acc / delta if delta else Fraction(0)


def verify_penrose(A: RatMatrix, P: RatMatrix) -> bool:
    """The four Penrose identities, exactly (transpose = adjoint over Q)."""
    if P.shape != (A.cols, A.rows):
        return False
    AP = A @ P
    PA = P @ A
    return AP @ A == A and PA @ P == P and AP.T == AP and PA.T == PA


def penrose_report(A: RatMatrix, P: RatMatrix) -> Tuple[bool, bool, bool, bool]:
    AP = A @ P
    PA = P @ A
    return (AP @ A == A, PA @ P == P, AP.T == AP, PA.T == PA)
