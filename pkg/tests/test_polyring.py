from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toricres.polyring import Poly, PolyMatrix, constant_part, parse_poly
from toricres.ratlin import RatMatrix

NAMES = ("x", "y", "z")


def polys(n=3):
    term = st.tuples(st.tuples(*[st.integers(0, 3)] * n),
                     st.fractions(min_value=-5, max_value=5, max_denominator=6))
    return st.lists(term, max_size=5).map(lambda ts: Poly(n, dict(ts)))


def test_parse_and_print():
    p = parse_poly("2*x - 1/4*y^3 + z", NAMES)
    assert p.to_text(NAMES) == "-1/4*y^3 + 2*x + z"
    assert parse_poly("0", NAMES).is_zero()


def test_parse_rejects_unknown_variable():
    with pytest.raises(ValueError):
        parse_poly("w + 1", NAMES)


@settings(max_examples=100, deadline=None)
@given(polys())
def test_text_round_trip(p):
    assert parse_poly(p.to_text(NAMES), NAMES) == p


@settings(max_examples=60, deadline=None)
@given(polys(), polys(), polys())
def test_ring_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert a - a == Poly.const(3, 0)


def test_substitute_and_evaluate():
    p = parse_poly("x - y^3", NAMES)
    y = Poly.var(3, 1)
    assert p.substitute({0: y ** 3}).is_zero()
    assert p.evaluate([F(8), F(2), 0]) == 0


def test_constant_term():
    assert parse_poly("3 + x", NAMES).constant_term() == 3
    assert parse_poly("x*y", NAMES).constant_term() == 0


def test_matrix_product_and_constant_part():
    A = PolyMatrix.from_rows([[parse_poly("x", NAMES), parse_poly("1", NAMES)]], 3)
    B = PolyMatrix.from_rows([[parse_poly("y", NAMES)], [parse_poly("-x*y", NAMES)]], 3)
    assert (A @ B).is_zero()
    assert constant_part(A) == RatMatrix([[0, 1]])
    assert A.T.shape == (2, 1)
    assert PolyMatrix.from_rat(RatMatrix([[1, 0]]), 3) == PolyMatrix.from_rows(
        [[Poly.const(3, 1), Poly.const(3, 0)]], 3)


def test_sparse_storage_drops_zeros():
    M = PolyMatrix.from_rows([[parse_poly("0", NAMES), parse_poly("x", NAMES)]], 3)
    assert list(M.entries) == [(0, 1)]
