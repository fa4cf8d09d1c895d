import io
import json
import os
import string
from fractions import Fraction as F

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from toricres.cli import (InputSpec, embedding_to_quadruple, emit_input, main, parse_input,
                          parse_matrix)
from toricres.errors import NotSaturated, ParseError, RankError, ValidationError
from toricres.ratlin import RatMatrix, rank


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_parse_error_has_position():
    with pytest.raises(ParseError, match="line 2, column"):
        parse_input('{"n": 2,\n "k": 1 "psi": []}')


def test_unknown_key_is_a_parse_error():
    with pytest.raises(ParseError, match="unknown key 'colour'"):
        parse_input('{"n": 2, "k": 1, "psi": [[1, -1]], "colour": "red"}')
    with pytest.raises(ParseError, match="unknown key"):
        parse_input('{"n": 2, "k": 1, "psi": [[1, -1]], "options": {"speed": 1}}')


def test_validation_errors():
    with pytest.raises(ValidationError):
        parse_input('{"n": 2, "k": 2, "psi": [[1, 1], [2, 2]]}')
    with pytest.raises(ValidationError, match="missing field"):
        parse_input('{"n": 2, "psi": [[1, -1]]}')
    with pytest.raises(ValidationError):
        parse_input('{"n": 2, "k": 1, "psi": [[1.5, -1]]}')


def test_embedding_trivial_sublattice_is_the_quadruple(corpus):
    a = parse_input(open(corpus("p311_point_embedding.json")).read())
    assert (a.n, a.k, a.psi) == (3, 2, ((1, 0, -3), (0, 1, -1)))


def test_embedding_errors():
    with pytest.raises(RankError):
        embedding_to_quadruple(((1, -1),), ((1,),))
    with pytest.raises(NotSaturated):
        embedding_to_quadruple(((1, 0, -1), (0, 1, -1)), ((2,), (0,)))


def test_embedding_quotient():
    spec = embedding_to_quadruple(((1, 0, -1), (0, 1, -1)), ((1,), (1,)))
    assert spec.k == 1
    assert rank(RatMatrix(spec.psi)) == 1
    assert sum(abs(x) for x in spec.psi[0]) > 0


names = st.lists(st.sampled_from(string.ascii_lowercase), min_size=4, max_size=4, unique=True)


@st.composite
def specs(draw):
    n = draw(st.integers(2, 4))
    k = draw(st.integers(1, min(n, 3)))
    psi = tuple(tuple(draw(st.integers(-3, 3)) for _ in range(n)) for _ in range(k))
    assume(rank(RatMatrix(psi)) == k)
    variables = draw(st.one_of(st.none(), names.map(lambda v: tuple(v[:n]))))
    group = draw(st.one_of(st.none(), st.text(string.ascii_letters, min_size=1, max_size=6)))
    options = {}
    if draw(st.booleans()):
        options["contraction"] = draw(st.sampled_from(["moore-penrose", "m.json"]))
    if draw(st.booleans()):
        options["emit"] = tuple(draw(st.lists(st.sampled_from(["report", "m2", "svg"]),
                                              min_size=1, unique=True)))
    if draw(st.booleans()):
        coeff = st.fractions(min_value=-4, max_value=4, max_denominator=5)
        vec = st.dictionaries(st.sampled_from(["E1", "E2", "V1"]), coeff, min_size=1)
        options["harmonic_basis"] = tuple(tuple(sorted(v.items())) for v in draw(
            st.lists(vec, min_size=1, max_size=2)))
    return InputSpec(n, k, psi, variables, None, group, options)


@settings(max_examples=100, deadline=None)
@given(specs())
def test_emit_parse_round_trip(spec):
    assert parse_input(emit_input(spec)) == spec


def test_parse_matrix():
    A = parse_matrix("# c\n1 -1/2\n0 3\n")
    assert A.tolist() == [[1, F(-1, 2)], [0, 3]]


def test_exit_codes(corpus, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run("stratify", "--input", str(bad))[0] == 2
    rank_def = tmp_path / "rd.json"
    rank_def.write_text('{"n": 2, "k": 2, "psi": [[1, 1], [2, 2]]}')
    assert run("stratify", "--input", str(rank_def))[0] == 3
    code, out, err = run("minres", "--input", corpus("plane_identity.json"))
    assert code == 4
    assert "hhl" in json.loads(out) and "error" in json.loads(out)
    assert err.startswith("error:")


def test_minres_report(corpus):
    code, out, _ = run("minres", "--input", corpus("p311_point.json"))
    assert code == 0
    rep = json.loads(out)
    assert rep["stratification"]["counts"] == [3, 7, 4]
    assert rep["betti"]["totals"] == [1, 2, 1]
    assert "minimal" in rep


def test_morse_input_uses_its_contraction_file(corpus):
    code, out, _ = run("minres", "--input", corpus("p311_point_morse.json"))
    assert code == 0
    assert "y^3 - x" in out


def test_outputs_are_deterministic(corpus, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        code, _, _ = run("verify", "--input", corpus("p311_point.json"), "--out", str(d),
                         "--emit", "report", "--emit", "m2", "--emit", "matrices",
                         "--emit", "svg")
        assert code == 0
    names = sorted(os.listdir(a))
    assert names == sorted(os.listdir(b))
    assert {"report.json", "complexes.m2", "stratification.svg"} <= set(names)
    for name in names:
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_mp_subcommand(corpus):
    code, out, _ = run("mp", "--input", corpus("mp_example.txt"))
    assert code == 0
    rep = json.loads(out)
    assert rep["pseudoinverse"] == [["1/3"], ["-1/3"], ["-1/3"]]
    assert rep["penrose"] == [True, True, True, True]


def test_svg_and_circle(corpus):
    code, out, _ = run("svg", "--input", corpus("p311_point.json"))
    assert code == 0 and out.startswith("<svg")
    code, out, _ = run("svg", "--input", corpus("p1_point.json"))
    assert code == 0 and out


def test_paths_subcommand(corpus):
    code, out, _ = run("paths", "--input", corpus("p311_point.json"), "--from", "F4", "--to", "E1")
    assert code == 0
    rep = json.loads(out)["paths"]
    assert rep["count"] == 1 and rep["sum"] == "-x"


def test_seed_input_is_reproducible():
    a = run("betti", "--seed", "3")
    b = run("betti", "--seed", "3")
    assert a == b
    assert a[0] in (0, 4)


def test_input_required():
    assert run("stratify")[0] == 3
