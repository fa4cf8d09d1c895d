"""Reference data for the point (y - z, x - y^3) in P(3,1,1).

The reference names cells V1..V3, E1..E7, F1..F4 by their position in the
fundamental square; ``POINTS`` gives one interior point of each, so cells are
matched by geometry rather than by name.  Orientation conventions may differ
from ours, so matrices agree up to a sign per cell, found by propagation.
"""

from fractions import Fraction as F

from toricres.polyring import PolyMatrix, parse_poly
from toricres.strat import Quadruple

NAMES = ("x", "y", "z")
PSI = ((1, 0, -3), (0, 1, -1))


def quadruple():
    return Quadruple(3, 2, PSI, names=NAMES)


POINTS = {
    "V1": (0, 0), "V2": (F(1, 3), 0), "V3": (F(2, 3), 0),
    "E1": (0, F(1, 2)), "E2": (F(1, 6), F(1, 2)), "E3": (F(1, 2), F(1, 2)),
    "E4": (F(5, 6), F(1, 2)), "E5": (F(1, 6), 0), "E6": (F(1, 2), 0), "E7": (F(5, 6), 0),
    "F1": (F(3, 20), F(3, 20)), "F2": (F(1, 3), F(1, 2)), "F3": (F(2, 3), F(1, 2)),
    "F4": (F(17, 20), F(17, 20)),
}

VERTICES = ("V1", "V2", "V3")
EDGES = ("E1", "E2", "E3", "E4", "E5", "E6", "E7")
FACES = ("F1", "F2", "F3", "F4")

CLASSES = {
    0: {"V1"},
    -1: {"V3", "E1", "E4", "E7", "F4"},
    -2: {"V2", "E3", "E6", "F3"},
    -3: {"E2", "E5", "F2"},
    -4: {"F1"},
}

# faces -> edges (rows E1..E7, columns F1..F4)
D_FACES = [
    ["-x", "0", "0", "1"],
    ["-z", "1", "0", "0"],
    ["0", "-z", "1", "0"],
    ["0", "0", "-z", "1"],
    ["-y", "1", "0", "0"],
    ["0", "-y", "1", "0"],
    ["0", "0", "-y", "1"],
]

# edges -> vertices (rows V1..V3, columns E1..E7)
D_EDGES = [
    ["y - z", "x", "0", "-y", "-x", "0", "z"],
    ["0", "-y", "1", "0", "z", "-1", "0"],
    ["0", "0", "-y", "1", "0", "z", "-1"],
]

# per-class boundary blocks and their pseudoinverses, in reference cell order:
# (class, degree of source, source cells, target cells, boundary, pseudoinverse)
BLOCKS = [
    (-1, 2, ("F4",), ("E1", "E4", "E7"), [[1], [1], [1]], [[F(1, 3), F(1, 3), F(1, 3)]]),
    (-1, 1, ("E1", "E4", "E7"), ("V3",), [[0, 1, -1]], [[0], [F(1, 2)], [F(-1, 2)]]),
    (-2, 2, ("F3",), ("E3", "E6"), [[1], [1]], [[F(1, 2), F(1, 2)]]),
    (-2, 1, ("E3", "E6"), ("V2",), [[1, -1]], [[F(1, 2)], [F(-1, 2)]]),
    (-3, 2, ("F2",), ("E2", "E5"), [[1], [1]], [[F(1, 2), F(1, 2)]]),
]

MORSE_PAIRS = [("V2", "E3"), ("V3", "E4"), ("E5", "F2"), ("E6", "F3"), ("E7", "F4")]
HARMONIC = {"E1": -2, "E4": 1, "E7": 1}


def poly_matrix(rows):
    return PolyMatrix.from_rows([[parse_poly(e, NAMES) for e in r] for r in rows], 3)


def name_map(strat):
    """Reference name -> our cell name, via the sample points."""
    return {ref: strat.cells[strat.locate(p)].name for ref, p in POINTS.items()}


def solve_signs(pairs):
    """Signs ``s`` with ``ref[r, c] == s[r] * s[c] * ours[r, c]`` for every pair.

    ``pairs`` holds ``(ours, ref, row names, col names)`` with matrices already
    permuted to reference order.  Returns the sign dict, or None if no
    assignment works.
    """
    edges = {}
    for ours, ref, rows, cols in pairs:
        for i, r in enumerate(rows):
            for j, c in enumerate(cols):
                a, b = ours[i, j], ref[i, j]
                if a.is_zero() and b.is_zero():
                    continue
                if b == a:
                    sign = 1
                elif b == -a:
                    sign = -1
                else:
                    return None
                edges.setdefault(r, []).append((c, sign))
                edges.setdefault(c, []).append((r, sign))
    signs = {}
    for start in sorted(edges):
        if start in signs:
            continue
        signs[start] = 1
        stack = [start]
        while stack:
            u = stack.pop()
            for v, sign in edges[u]:
                want = signs[u] * sign
                if v not in signs:
                    signs[v] = want
                    stack.append(v)
                elif signs[v] != want:
                    return None
    return signs


def permuted(M: PolyMatrix, our_rows, our_cols, row_order, col_order):
    """Submatrix of ``M`` with rows/columns rearranged to the given our-name orders."""
    ri = [our_rows.index(r) for r in row_order]
    ci = [our_cols.index(c) for c in col_order]
    return M.submatrix(ri, ci)
