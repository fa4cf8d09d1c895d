"""Seeded random inputs for the property suites and ``--seed``."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations
from typing import Iterator, Optional

from .errors import NoPositiveGrading
from .grading import find_positive_grading
from .hhl import build_hhl_complex
from .ratlin import RatMatrix, StrictSystem, feasible_interior_point, int_det, rank
from .strat import Quadruple, enumerate_cells


def random_psi(rng: random.Random, k: int, n: int, lo: int = -3, hi: int = 3) -> tuple:
    """A rank-``k`` integer ``k x n`` matrix with no zero column."""
    while True:
        psi = tuple(tuple(rng.randint(lo, hi) for _ in range(n)) for _ in range(k))
        if any(all(psi[r][c] == 0 for r in range(k)) for c in range(n)):
            continue
        if rank(RatMatrix(psi, k, n)) == k:
            return psi


def vertex_bound(psi) -> int:
    """Sum of ``|det|`` over k-subsets of columns: bounds the number of torus vertices."""
    k, n = len(psi), len(psi[0])
    return sum(abs(int_det([[psi[r][c] for c in S] for r in range(k)]))
               for S in combinations(range(n), k))


def _parallel(u, v) -> bool:
    return rank(RatMatrix([u, v], 2, len(u))) < 2


def surely_not_positive(q: Quadruple) -> bool:
    """Cheap exact rejection for k >= 2.

    If no other column of psi is parallel to column ``i``, some codimension-one
    cell lies on ``H_i`` alone and contributes the exponent ``e_i``; when this
    holds for every column, a positive grading exists only if ker(psi) has a
    vector with all entries >= 1.
    """
    if q.k < 2:
        return False
    cols = [q.b(i) for i in range(q.n)]
    if any(_parallel(cols[i], cols[j]) for i in range(q.n) for j in range(i + 1, q.n)):
        return False
    system = StrictSystem(q.n, tuple((row, Fraction(0)) for row in q.psi), (),
                          tuple((tuple(int(i == j) for j in range(q.n)), Fraction(1), None)
                                for i in range(q.n)))
    return feasible_interior_point(system) is None


def random_quadruple(rng: random.Random, ks=(1, 2), max_n: int = 6, lo: int = -3,
                     hi: int = 3, max_vertices: Optional[int] = 16) -> Quadruple:
    """Random quadruple whose cellular complex admits a positive grading.

    ``max_vertices`` caps :func:`vertex_bound` to keep the suites fast.
    """
    while True:
        k = rng.choice(ks)
        n = rng.randint(k + 1, max_n)
        q = Quadruple(n, k, random_psi(rng, k, n, lo, hi))
        if max_vertices is not None and vertex_bound(q.psi) > max_vertices:
            continue
        if surely_not_positive(q):
            continue
        try:
            find_positive_grading(build_hhl_complex(q, enumerate_cells(q)))
        except NoPositiveGrading:
            continue
        return q


def quadruple_stream(seed: int, count: int, **kwargs) -> Iterator[Quadruple]:
    rng = random.Random(seed)
    for _ in range(count):
        yield random_quadruple(rng, **kwargs)


def random_int_matrix(rng: random.Random, max_rows: int = 6, max_cols: int = 6,
                      lo: int = -3, hi: int = 3) -> RatMatrix:
    """Random integer matrix; about a third are forced to drop rank."""
    r, c = rng.randint(1, max_rows), rng.randint(1, max_cols)
    rows = [[rng.randint(lo, hi) for _ in range(c)] for _ in range(r)]
    if r > 1 and rng.random() < 0.35:
        a, b = rng.sample(range(r), 2)
        s = rng.randint(-2, 2)
        rows[b] = [x * s for x in rows[a]]
    return RatMatrix(rows, r, c)
