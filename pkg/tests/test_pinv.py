from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toricres.errors import TooLarge
from toricres.pinv import (mp_entry, mp_inverse, mp_inverse_hedge, penrose_report,
                           verify_penrose)
from toricres.ratlin import RatMatrix


def matrices(max_rows=4, max_cols=4):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(st.integers(-3, 3), min_size=c, max_size=c),
                               min_size=r, max_size=r))).map(RatMatrix)


def test_rank_one_example():
    A = RatMatrix([[1, 1], [1, 1]])
    assert mp_inverse(A) == RatMatrix([[F(1, 4), F(1, 4)], [F(1, 4), F(1, 4)]])


def test_column_vector():
    A = RatMatrix([[1], [2]])
    assert mp_inverse(A) == RatMatrix([[F(1, 5), F(2, 5)]])


def test_zero_matrix():
    assert mp_inverse(RatMatrix.zeros(2, 3)) == RatMatrix.zeros(3, 2)


def test_invertible_matches_inverse():
    A = RatMatrix([[2, 1], [1, 1]])
    assert mp_inverse(A) == RatMatrix([[1, -1], [-1, 2]])


def test_penrose_detects_a_wrong_inverse():
    A = RatMatrix([[1, 1], [1, 1]])
    assert not verify_penrose(A, RatMatrix([[1, 0], [0, 0]]))
    assert penrose_report(A, mp_inverse(A)) == (True, True, True, True)


def test_hedge_bound():
    with pytest.raises(TooLarge):
        mp_inverse_hedge(RatMatrix.zeros(9, 2))


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_three_formulas_agree(A):
    P = mp_inverse(A)
    assert verify_penrose(A, P)
    assert mp_inverse_hedge(A) == P
    assert all(mp_entry(A, i, j) == P[i, j] for i in range(A.cols) for j in range(A.rows))
