import pytest

from toricres.errors import BadUserBasis, NoPositiveGrading
from toricres.grading import betti_table, build_bm_complexes, find_positive_grading, harmonic_basis
from toricres.hhl import build_hhl_complex
from toricres.ratlin import RatMatrix
from toricres.strat import Quadruple


def p311():
    return Quadruple(3, 2, ((1, 0, -3), (0, 1, -1)), names=("x", "y", "z"))


def test_theta_p311():
    C = build_hhl_complex(p311())
    assert find_positive_grading(C) == (3, 1, 1)


def test_class_labels_and_betti():
    G = build_bm_complexes(build_hhl_complex(p311()))
    assert [G.label(c) for c in G.order] == ["[0]", "[-1]", "[-2]", "[-3]", "[-4]"]
    table = {(i, G.label(c)): v for (i, c), v in betti_table(G).items() if v}
    assert table == {(0, "[0]"): 1, (1, "[-1]"): 1, (1, "[-3]"): 1, (2, "[-4]"): 1}


def test_bm_blocks_are_complexes():
    G = build_bm_complexes(build_hhl_complex(p311()))
    for B in G.complexes:
        prod = B.d(1) @ B.d(2)
        assert prod == RatMatrix.zeros(prod.rows, prod.cols)


def test_identity_has_no_positive_grading():
    C = build_hhl_complex(Quadruple(2, 2, ((1, 0), (0, 1))))
    with pytest.raises(NoPositiveGrading) as info:
        find_positive_grading(C)
    assert "exponent" in str(info.value)


def test_user_harmonic_basis_checks():
    G = build_bm_complexes(build_hhl_complex(p311()))
    B = next(B for B in G.complexes if any(harmonic_basis(B, 1)))
    (v,) = harmonic_basis(B, 1)
    assert harmonic_basis(B, 1, [[2 * x for x in v]]) == [tuple(2 * x for x in v)]
    with pytest.raises(BadUserBasis):
        harmonic_basis(B, 1, [[1] + [0] * (B.size(1) - 1)])
    with pytest.raises(BadUserBasis):
        harmonic_basis(B, 1, [v, v])
    with pytest.raises(BadUserBasis):
        harmonic_basis(B, 1, [])
