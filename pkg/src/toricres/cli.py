"""Command-line front end: input parsing, emitters and subcommands.

Input is a JSON object, either quadruple form::

    {"n": 3, "k": 2, "psi": [[1, 0, -3], [0, 1, -1]], "variables": ["x", "y", "z"]}

or embedding form (ray matrix plus a sublattice basis, both column-wise)::

    {"rays": [[1, 0, -3], [0, 1, -1]], "sublattice": [[], []]}

Both accept optional ``fan``, ``group`` and ``options``.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from .errors import (NoPositiveGrading, NotSaturated, ParseError, RankError, ToricResError,
                     ValidationError)
from .grading import betti_table, build_bm_complexes, find_positive_grading
from .hhl import LineBundleComplex, build_hhl_complex, verify_complex
from .hpl import MOORE_PENROSE, contraction_from_entries, minimal_resolution
from .paths import context_for, crosscheck_sigma, enumerate_paths
from .pinv import mp_inverse, penrose_report
from .polyring import PolyMatrix
from .ratlin import RatMatrix, smith
from .strat import EQ, Quadruple, Stratification, enumerate_cells

FORMATS = ("report", "matrices", "m2", "svg")
QUADRUPLE_KEYS = {"n", "k", "psi", "variables", "fan", "group", "options"}
EMBEDDING_KEYS = {"rays", "sublattice", "fan", "variables", "group", "options"}
OPTION_KEYS = {"contraction", "harmonic_basis", "emit"}
CONTRACTION_KEYS = {"kind", "entries", "pairs"}


# -- values -----------------------------------------------------------------

def fmt(x) -> object:
    """Fractions as JSON: integers stay integers, the rest become ``"p/q"``."""
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _rational(value, where: str) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise ValidationError(f"{where}: expected an integer or a 'p/q' string, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            pass
    raise ValidationError(f"{where}: expected an integer or a 'p/q' string, got {value!r}")


def _integer(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"{where}: expected an integer, got {value!r}")
    return value


def _int_matrix(value, where: str, rows: Optional[int] = None,
                cols: Optional[int] = None) -> tuple:
    if not isinstance(value, list) or any(not isinstance(r, list) for r in value):
        raise ValidationError(f"{where}: expected a list of integer rows")
    out = tuple(tuple(_integer(x, f"{where}[{i}][{j}]") for j, x in enumerate(r))
                for i, r in enumerate(value))
    if rows is not None and len(out) != rows:
        raise ValidationError(f"{where}: expected {rows} rows, got {len(out)}")
    widths = {len(r) for r in out}
    if len(widths) > 1:
        raise ValidationError(f"{where}: rows have different lengths")
    if cols is not None and out and len(out[0]) != cols:
        raise ValidationError(f"{where}: expected {cols} columns, got {len(out[0])}")
    return out


def _load_json(text: str, source: str = "input"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _check_keys(obj, allowed, where):
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected a JSON object")
    extra = sorted(set(obj) - allowed)
    if extra:
        raise ParseError(f"{where}: unknown key {extra[0]!r} (allowed: {', '.join(sorted(allowed))})")


# -- input ------------------------------------------------------------------

@dataclass
class InputSpec:
    n: int
    k: int
    psi: tuple
    variables: Optional[tuple] = None
    fan: Optional[tuple] = None
    group: Optional[str] = None
    options: Dict[str, object] = field(default_factory=dict)

    def quadruple(self) -> Quadruple:
        return Quadruple(self.n, self.k, self.psi, self.fan, self.variables, self.group)

    @property
    def contraction(self) -> str:
        return self.options.get("contraction", MOORE_PENROSE)

    @property
    def harmonic_basis(self):
        return self.options.get("harmonic_basis", "canonical")

    @property
    def emit(self) -> tuple:
        return self.options.get("emit", ("report",))


def _parse_options(obj) -> dict:
    if obj is None:
        return {}
    _check_keys(obj, OPTION_KEYS, "options")
    out = {}
    if "contraction" in obj:
        c = obj["contraction"]
        if not isinstance(c, str) or not c:
            raise ValidationError("options.contraction: expected 'moore-penrose' or a file path")
        out["contraction"] = MOORE_PENROSE if c in ("mp", MOORE_PENROSE) else c
    if "harmonic_basis" in obj:
        h = obj["harmonic_basis"]
        if h == "canonical":
            out["harmonic_basis"] = "canonical"
        elif isinstance(h, str) and h:
            out["harmonic_basis"] = h
        elif isinstance(h, list):
            out["harmonic_basis"] = _parse_vectors(h, "options.harmonic_basis")
        else:
            raise ValidationError("options.harmonic_basis: expected 'canonical', a file path "
                                  "or a list of vectors")
    if "emit" in obj:
        e = obj["emit"]
        if isinstance(e, str):
            e = [e]
        if not isinstance(e, list) or any(x not in FORMATS for x in e):
            raise ValidationError(f"options.emit: expected formats from {', '.join(FORMATS)}")
        out["emit"] = tuple(dict.fromkeys(e))
    return out


def _parse_vectors(vecs, where) -> tuple:
    out = []
    for i, v in enumerate(vecs):
        if not isinstance(v, dict) or not v:
            raise ValidationError(f"{where}[{i}]: expected a non-empty object cell -> coefficient")
        out.append(tuple(sorted((str(c), _rational(x, f"{where}[{i}].{c}")) for c, x in v.items())))
    return tuple(out)


def parse_input(text: str) -> InputSpec:
    """Strict parse of the JSON input; embedding form is converted on the fly."""
    obj = _load_json(text)
    if not isinstance(obj, dict):
        raise ParseError("input: expected a JSON object at the top level")
    if "rays" in obj:
        _check_keys(obj, EMBEDDING_KEYS, "input")
        for key in ("rays", "sublattice"):
            if key not in obj:
                raise ValidationError(f"input: missing field {key!r}")
        rays = _int_matrix(obj["rays"], "rays")
        d = len(rays)
        sub = _int_matrix(obj["sublattice"], "sublattice", rows=d)
        spec = embedding_to_quadruple(rays, sub)
    else:
        _check_keys(obj, QUADRUPLE_KEYS, "input")
        for key in ("n", "k", "psi"):
            if key not in obj:
                raise ValidationError(f"input: missing field {key!r}")
        n = _integer(obj["n"], "n")
        k = _integer(obj["k"], "k")
        spec = InputSpec(n, k, _int_matrix(obj["psi"], "psi", rows=k, cols=n))
    if "variables" in obj:
        v = obj["variables"]
        if not isinstance(v, list) or any(not isinstance(x, str) or not x.isidentifier() for x in v):
            raise ValidationError("variables: expected a list of identifier strings")
        spec.variables = tuple(v)
    if "fan" in obj:
        f = obj["fan"]
        if not isinstance(f, list) or any(not isinstance(c, list) for c in f):
            raise ValidationError("fan: expected a list of cones (lists of ray indices)")
        spec.fan = tuple(tuple(sorted(_integer(i, "fan") for i in c)) for c in f)
    if "group" in obj:
        if not isinstance(obj["group"], str):
            raise ValidationError("group: expected a string")
        spec.group = obj["group"]
    spec.options = _parse_options(obj.get("options"))
    spec.quadruple()
    return spec


def embedding_to_quadruple(rays, sublattice) -> InputSpec:
    """``psi`` = rays followed by the quotient map onto ``Z^d / sublattice``.

    ``rays`` is ``d x n`` and ``sublattice`` is ``d x m``, both column-wise.
    """
    d = len(rays)
    n = len(rays[0]) if d else 0
    m = len(sublattice[0]) if sublattice and sublattice[0] else 0
    if m:
        S = smith(sublattice)
        factors = S.invariant_factors
        if len(factors) < m:
            raise RankError(f"sublattice basis has rank {len(factors)} < {m} columns")
        torsion = [f for f in factors if f != 1]
        if torsion:
            raise NotSaturated(f"sublattice is not saturated: quotient has torsion "
                               f"Z/{torsion[0]}")
        U = S.U
    else:
        U = tuple(tuple(int(i == j) for j in range(d)) for i in range(d))
    k = d - m
    if k <= 0:
        raise RankError("sublattice is the whole lattice: nothing to resolve (k = 0)")
    psi = tuple(tuple(sum(U[m + r][t] * rays[t][c] for t in range(d)) for c in range(n))
                for r in range(k))
    return InputSpec(n, k, psi)


def emit_input(spec: InputSpec) -> str:
    """Canonical quadruple-form JSON; ``parse_input(emit_input(s)) == s``."""
    obj = {"n": spec.n, "k": spec.k, "psi": [list(r) for r in spec.psi]}
    if spec.variables is not None:
        obj["variables"] = list(spec.variables)
    if spec.fan is not None:
        obj["fan"] = [list(c) for c in spec.fan]
    if spec.group is not None:
        obj["group"] = spec.group
    if spec.options:
        opts = {}
        for key in sorted(spec.options):
            val = spec.options[key]
            if key == "harmonic_basis" and isinstance(val, tuple):
                val = [{c: fmt(x) for c, x in v} for v in val]
            elif key == "emit":
                val = list(val)
            opts[key] = val
        obj["options"] = opts
    return json.dumps(obj, indent=2) + "\n"


def load_contraction(path: str):
    """Contraction file -> factory ``(hhl, grading) -> Contraction``."""
    obj = _read_json_file(path)
    _check_keys(obj, CONTRACTION_KEYS, path)
    kind = obj.get("kind", "homotopy")
    if kind == "matching":
        pairs = obj.get("pairs")
        if not isinstance(pairs, list) or any(
                not isinstance(p, list) or len(p) != 2 or not all(isinstance(c, str) for c in p)
                for p in pairs):
            raise ValidationError(f"{path}: 'pairs' must be a list of [lower, upper] cell names")
        data = [tuple(p) for p in pairs]
    elif kind in ("homotopy", "splitting"):
        entries = obj.get("entries")
        if not isinstance(entries, list) or any(
                not isinstance(e, list) or len(e) != 3 for e in entries):
            raise ValidationError(f"{path}: 'entries' must be a list of [source, target, value]")
        data = [(str(a), str(b), _rational(v, f"{path} entry {a}->{b}")) for a, b, v in entries]
    else:
        raise ValidationError(f"{path}: kind must be matching, homotopy or splitting")
    return lambda C, grading: contraction_from_entries(C, grading, data, kind)


def load_harmonic(path: str) -> tuple:
    obj = _read_json_file(path)
    _check_keys(obj, {"vectors"}, path)
    if not isinstance(obj.get("vectors"), list):
        raise ValidationError(f"{path}: 'vectors' must be a list")
    return _parse_vectors(obj["vectors"], path)


def _read_json_file(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None
    return _load_json(text, path)


def parse_matrix(text: str) -> RatMatrix:
    """JSON (``[[...]]`` or ``{"matrix": [[...]]}``) or whitespace-separated rows."""
    stripped = text.strip()
    if stripped.startswith(("[", "{")):
        obj = _load_json(stripped, "matrix")
        if isinstance(obj, dict):
            _check_keys(obj, {"matrix"}, "matrix")
            obj = obj.get("matrix")
        if not isinstance(obj, list) or not obj or any(not isinstance(r, list) for r in obj):
            raise ValidationError("matrix: expected a non-empty list of rows")
        rows = [[_rational(x, f"matrix[{i}][{j}]") for j, x in enumerate(r)]
                for i, r in enumerate(obj)]
    else:
        rows = []
        for lineno, line in enumerate(stripped.splitlines(), 1):
            line = line.split("#")[0].strip()
            if not line:
                continue
            try:
                rows.append([Fraction(x) for x in line.split()])
            except (ValueError, ZeroDivisionError):
                raise ParseError(f"matrix: line {lineno}: not a row of rationals") from None
    if not rows or len({len(r) for r in rows}) != 1 or not rows[0]:
        raise ValidationError("matrix: rows must be non-empty and of equal length")
    return RatMatrix(rows, len(rows), len(rows[0]))


# -- report pieces ----------------------------------------------------------

def _label_json(label):
    return [[m, "eq" if kind == EQ else "int"] for m, kind in label]


def stratification_json(strat: Stratification) -> dict:
    cells = []
    for c in strat.cells:
        cells.append({
            "name": c.name,
            "dim": c.dim,
            "label": _label_json(c.label),
            "ceiling": list(c.ceiling),
            "point": [fmt(x) for x in c.point],
            "facets": [{"cell": strat.cells[inc.child].name, "shift": list(inc.shift),
                        "epsilon": list(inc.epsilon), "sign": inc.sign}
                       for inc in strat.incidences[c.id]],
        })
    return {"counts": list(strat.counts()), "cells": cells}


def matrix_rows(M: PolyMatrix, names) -> list:
    return M.to_text_rows(names)


def complex_json(C: LineBundleComplex, with_class=False, grading=None) -> dict:
    terms = []
    for t in C.terms:
        row = []
        for g in t:
            item = {"name": g.name, "a": list(g.a)}
            if with_class and grading is not None:
                item["class"] = grading.label(g.class_id)
            row.append(item)
        terms.append(row)
    return {
        "ranks": list(C.ranks()),
        "terms": terms,
        "differentials": {str(i): matrix_rows(C.differential(i), C.names)
                          for i in range(1, C.length + 1)},
    }


def grading_json(grading, strat) -> dict:
    classes = []
    for B in grading.complexes:
        classes.append({
            "label": grading.label(B.class_id),
            "grade": B.grade,
            "class": str(B.class_id),
            "cells": {str(i): [strat.cells[c].name for c in cs] for i, cs in B.cells.items()},
        })
    return {"theta": list(grading.theta), "classes": classes}


def betti_json(grading, k) -> dict:
    table = betti_table(grading)
    rows = [{"degree": i, "class": grading.label(cid), "beta": b}
            for (i, cid), b in sorted(table.items(),
                                      key=lambda kv: (kv[0][0], grading.grade[kv[0][1]]))
            if b]
    totals = [sum(b for (i, _), b in table.items() if i == d) for d in range(k + 1)]
    return {"nonzero": rows, "totals": totals}


def m2_script(q: Quadruple, complexes: Dict[str, LineBundleComplex]) -> str:
    """Macaulay2 script defining the matrices and checking ``d d = 0``."""
    names = q.variable_names
    lines = [f"R = QQ[{', '.join(names)}];"]
    for tag, C in complexes.items():
        for i in range(1, C.length + 1):
            M = C.differential(i)
            rows = M.to_text_rows(names)
            if M.rows == 0 or M.cols == 0:
                lines.append(f"{tag}{i} = map(R^{M.rows}, R^{M.cols}, 0);")
                continue
            body = ", ".join("{" + ", ".join(r) + "}" for r in rows)
            lines.append(f"{tag}{i} = map(R^{M.rows}, R^{M.cols}, {{{body}}});")
        for i in range(1, C.length):
            lines.append(f"assert({tag}{i} * {tag}{i + 1} == 0);")
    return "\n".join(lines) + "\n"


def matrices_text(C: LineBundleComplex, tag: str) -> Dict[str, str]:
    """One plain-text file per differential: tab-separated polynomial rows."""
    out = {}
    for i in range(1, C.length + 1):
        M = C.differential(i)
        body = "\n".join("\t".join(r) for r in M.to_text_rows(C.names))
        out[f"{tag}{i}.txt"] = (f"# {tag}{i}: {M.rows} x {M.cols}\n" + body + "\n")
    return out


# -- figures ----------------------------------------------------------------

def _clip_line(b, m):
    """Endpoints of ``b.f = m`` inside the unit square, or None."""
    pts = set()
    b1, b2 = Fraction(b[0]), Fraction(b[1])
    for fixed in (0, 1):
        if b2 != 0:
            y = (m - b1 * fixed) / b2
            if 0 <= y <= 1:
                pts.add((Fraction(fixed), y))
        if b1 != 0:
            x = (m - b2 * fixed) / b1
            if 0 <= x <= 1:
                pts.add((x, Fraction(fixed)))
    pts = sorted(pts)
    if len(pts) < 2:
        return None
    return pts[0], pts[-1]


def _lifts_in_square(point):
    """Integer translates of ``point`` in the closed unit square."""
    out = []
    options = []
    for x in point:
        opts = [x - int(x // 1)]
        if opts[0] == 0:
            opts.append(Fraction(1))
        options.append(opts)
    for a in options[0]:
        for b in options[1]:
            out.append((a, b))
    return out


def svg_figure(strat: Stratification, size: int = 360) -> str:
    """Fundamental domain of a 2-torus stratification with every cell labelled once."""
    q = strat.quadruple
    if q.k != 2:
        raise ValidationError("SVG output is only drawn for k = 2")
    pad = 30

    def xy(p):
        return (pad + float(p[0]) * size, pad + (1 - float(p[1])) * size)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size + 2 * pad}" '
             f'height="{size + 2 * pad}" viewBox="0 0 {size + 2 * pad} {size + 2 * pad}">',
             f'<rect x="{pad}" y="{pad}" width="{size}" height="{size}" fill="none" '
             f'stroke="black" stroke-width="1"/>']
    for i in range(q.n):
        b = q.b(i)
        lo = sum(min(0, x) for x in b)
        hi = sum(max(0, x) for x in b)
        for m in range(lo, hi + 1):
            seg = _clip_line(b, Fraction(m))
            if seg is None:
                continue
            (x1, y1), (x2, y2) = xy(seg[0]), xy(seg[1])
            parts.append(f'<line class="hyperplane H{i + 1}" x1="{x1:.2f}" y1="{y1:.2f}" '
                         f'x2="{x2:.2f}" y2="{y2:.2f}" stroke="black" stroke-width="1.5"/>')
    for c in strat.by_dim(0):
        for p in _lifts_in_square(c.point):
            x, y = xy(p)
            parts.append(f'<circle class="vertex {c.name}" cx="{x:.2f}" cy="{y:.2f}" r="3"/>')
    colours = {0: "black", 1: "#1f4e9c", 2: "#9c1f1f"}
    for c in strat.cells:
        x, y = xy(c.point)
        dx = -10 if c.dim == 0 else 0
        dy = 14 if c.dim == 0 else 4
        parts.append(f'<text class="cell dim{c.dim}" x="{x + dx:.2f}" y="{y + dy:.2f}" '
                     f'font-size="12" fill="{colours[c.dim]}">{c.name}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def circle_diagram(strat: Stratification) -> str:
    """Text picture of a 1-torus stratification: cells in circular order."""
    q = strat.quadruple
    if q.k != 1:
        raise ValidationError("the circle diagram is only drawn for k = 1")
    cells = sorted(strat.cells, key=lambda c: (c.point[0] % 1, c.dim))
    lines = [f"R/Z with {len(strat.by_dim(0))} vertices and {len(strat.by_dim(1))} edges"]
    for c in cells:
        where = str(c.point[0] % 1)
        lines.append(f"  {where:>8}  {c.name:<4} O(-a), a = {list(c.ceiling)}")
    lines.append("  (wraps around to the first vertex)")
    return "\n".join(lines) + "\n"


# -- subcommands ------------------------------------------------------------

class Session:
    """Lazily computed pipeline stages for one input."""

    def __init__(self, spec: InputSpec, contraction: Optional[str] = None,
                 harmonic: Optional[str] = None, base_dir: str = "."):
        self.spec = spec
        self.q = spec.quadruple()
        self.contraction = contraction or spec.contraction
        self.harmonic = harmonic or spec.harmonic_basis
        self.base_dir = base_dir
        self._strat = None
        self._hhl = None
        self._grading = None
        self._res = None

    def path(self, p):
        return p if os.path.isabs(p) else os.path.join(self.base_dir, p)

    @property
    def strat(self):
        if self._strat is None:
            self._strat = enumerate_cells(self.q)
        return self._strat

    @property
    def hhl(self):
        if self._hhl is None:
            self._hhl = build_hhl_complex(self.q, self.strat)
        return self._hhl

    @property
    def grading(self):
        if self._grading is None:
            self._grading = build_bm_complexes(self.hhl, find_positive_grading(self.hhl))
        return self._grading

    def resolution(self, verify=True):
        if self._res is None:
            factory = None
            if self.contraction not in (MOORE_PENROSE, "mp"):
                factory = load_contraction(self.path(self.contraction))
            harmonic = None
            if isinstance(self.harmonic, tuple):
                harmonic = [dict(v) for v in self.harmonic]
            elif self.harmonic != "canonical":
                harmonic = [dict(v) for v in load_harmonic(self.path(self.harmonic))]
            self._res = minimal_resolution(self.q, factory, harmonic, verify, self.strat)
            self._grading = self._res.grading
        return self._res


def _base_report(s: Session, command: str) -> dict:
    return {"command": command, "input": json.loads(emit_input(s.spec))}


def _hhl_section(s: Session) -> dict:
    out = complex_json(s.hhl)
    out["d_squared_zero"] = verify_complex(s.hhl)["ok"]
    return out


def _resolution_section(s: Session, res) -> dict:
    out = complex_json(res.complex, with_class=True, grading=res.grading)
    out["contraction"] = res.sdr.contraction.provenance
    out["checks"] = res.checks
    out["perturbation_steps"] = {str(d): n for d, n in res.perturbed.iterations.items()}
    return out


def run_subcommand(command: str, s: Session, args) -> tuple:
    """Returns ``(report dict, extra files {name: text})``."""
    report = _base_report(s, command)
    files: Dict[str, str] = {}
    emits = set(args.emit or s.spec.emit)
    try:
        report["stratification"] = stratification_json(s.strat)
        if command in ("hhl", "betti", "minres", "verify", "paths"):
            report["hhl"] = _hhl_section(s)
        if command == "betti":
            report["grading"] = grading_json(s.grading, s.strat)
            report["betti"] = betti_json(s.grading, s.q.k)
        elif command in ("minres", "verify"):
            res = s.resolution(verify=True)
            report["grading"] = grading_json(res.grading, s.strat)
            report["betti"] = betti_json(res.grading, s.q.k)
            report["minimal"] = _resolution_section(s, res)
            if command == "verify":
                cross = crosscheck_sigma(res.sdr, res.grading, res.perturbed.sigma,
                                         res.perturbed.d_min)
                report["verify"] = {"paths_equal_series": sorted(cross),
                                    "sdr_identities": res.checks["sdr"],
                                    "series_identities": res.checks["series"],
                                    "minimal": res.checks["minimal"]}
        elif command == "paths":
            report["paths"] = paths_report(s, args.source, args.target)
    except NoPositiveGrading as exc:
        if "hhl" not in report:
            report["hhl"] = _hhl_section(s)
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        _figure_files(s, emits, files)
        _matrix_files(s, emits, files, None)
        raise _Partial(report, files, exc) from exc
    _figure_files(s, emits | ({"svg"} if command == "svg" else set()), files)
    _matrix_files(s, emits, files, s._res)
    return report, files


class _Partial(Exception):
    """Carries the artifacts written before a grading failure."""

    def __init__(self, report, files, cause):
        super().__init__(str(cause))
        self.report = report
        self.files = files
        self.cause = cause


def _figure_files(s: Session, emits, files):
    if "svg" not in emits:
        return
    if s.q.k == 2:
        files["stratification.svg"] = svg_figure(s.strat)
    elif s.q.k == 1:
        files["stratification.txt"] = circle_diagram(s.strat)


def _matrix_files(s: Session, emits, files, res):
    if "matrices" in emits:
        files.update(matrices_text(s.hhl, "hhl_d"))
        if res is not None:
            files.update(matrices_text(res.complex, "min_d"))
    if "m2" in emits:
        complexes = {"hhl": s.hhl}
        if res is not None:
            complexes["dmin"] = res.complex
        files["complexes.m2"] = m2_script(s.q, complexes)


def paths_report(s: Session, source: str, target: str) -> dict:
    if not source or not target:
        raise ValidationError("paths: --from and --to cell names are required")
    res = s.resolution(verify=False)
    ctx = context_for(res.sdr, res.grading)
    names = s.q.variable_names
    try:
        a, b = s.strat.by_name(source), s.strat.by_name(target)
    except KeyError as exc:
        raise ValidationError(f"paths: unknown cell {exc.args[0]!r}") from None
    out, total = [], None
    for p in enumerate_paths(ctx, a.id, b.id):
        cells = [s.strat.cells[c].name for c in p.cells]
        steps = []
        for x, y, kind in zip(p.cells, p.cells[1:], p.kinds):
            if kind == "I":
                w = next(wt for c, wt in ctx.down(x) if c == y).to_text(names)
            else:
                w = str(next(wt for c, wt in ctx.up(x) if c == y))
            steps.append({"from": s.strat.cells[x].name, "to": s.strat.cells[y].name,
                          "type": kind, "weight": w})
        out.append({"cells": cells, "steps": steps, "sign": (-1) ** p.type_two_steps(),
                    "value": p.weight.to_text(names)})
        total = p.weight if total is None else total + p.weight
    entry = None
    if b.dim == a.dim - 1:
        pos = {g.cell: j for t in s.hhl.terms for j, g in enumerate(t)}
        entry = res.perturbed.sigma[a.dim][pos[b.id], pos[a.id]].to_text(names)
    return {"from": source, "to": target, "count": len(out), "paths": out,
            "sum": total.to_text(names) if total is not None else "0",
            "series_entry": entry}


def run_mp(args) -> dict:
    if not args.input:
        raise ValidationError("mp: --input FILE with a matrix is required")
    try:
        with open(args.input, encoding="utf-8") as fh:
            A = parse_matrix(fh.read())
    except OSError as exc:
        raise ParseError(f"{args.input}: {exc.strerror}") from None
    P = mp_inverse(A)
    checks = penrose_report(A, P)
    if not all(checks):
        from .errors import VerificationFailure
        raise VerificationFailure(f"Penrose identities failed: {checks}")
    return {"command": "mp", "shape": list(A.shape),
            "pseudoinverse": [[fmt(x) for x in row] for row in P.tolist()],
            "penrose": list(checks)}


# -- entry point ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toricres",
        description="Minimal resolutions of toric substack pushforwards, exactly.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
            ("stratify", "enumerate torus cells and facet incidences"),
            ("hhl", "cellular complex of line bundles"),
            ("betti", "positive grading, class complexes and Betti table"),
            ("minres", "minimal resolution via perturbation"),
            ("paths", "zig-zag paths between two cells"),
            ("mp", "Moore-Penrose inverse of a rational matrix"),
            ("verify", "minimal resolution plus every identity and the path cross-check"),
            ("svg", "figure of the stratification (k = 2; k = 1 gets text)")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--input", metavar="FILE", help="input JSON (or matrix file for mp)")
        p.add_argument("--contraction", metavar="{mp|FILE}", default=None,
                       help="moore-penrose (default) or a contraction file")
        p.add_argument("--harmonic-basis", metavar="{canonical|FILE}", default=None,
                       help="canonical (default) or a file of representative vectors")
        p.add_argument("--emit", action="append", choices=FORMATS, default=None,
                       help="artifacts to write (repeatable)")
        p.add_argument("--out", metavar="DIR", help="write artifacts here instead of stdout")
        p.add_argument("--seed", type=int, default=None,
                       help="without --input: use a random positivity-passing input")
        if name == "paths":
            p.add_argument("--from", dest="source", required=True, metavar="CELL")
            p.add_argument("--to", dest="target", required=True, metavar="CELL")
    return parser


def _load_spec(args) -> tuple:
    if args.input:
        try:
            with open(args.input, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ParseError(f"{args.input}: {exc.strerror}") from None
        return parse_input(text), os.path.dirname(os.path.abspath(args.input))
    if args.seed is not None:
        from .generators import random_quadruple
        q = random_quadruple(random.Random(args.seed))
        return InputSpec(q.n, q.k, q.psi), os.getcwd()
    raise ValidationError("--input FILE (or --seed N) is required")


def _write(report: dict, files: Dict[str, str], args, emits=(), out=sys.stdout):
    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        if "report" in emits or not files:
            with open(os.path.join(args.out, "report.json"), "w", encoding="utf-8") as fh:
                fh.write(text)
        for name, body in files.items():
            with open(os.path.join(args.out, name), "w", encoding="utf-8") as fh:
                fh.write(body)
    elif args.command == "svg" and files:
        out.write(next(iter(files.values())))
    else:
        out.write(text)


def main(argv: Optional[Sequence[str]] = None, out=sys.stdout, err=sys.stderr) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "mp":
            _write(run_mp(args), {}, args, ("report",), out)
            return 0
        spec, base = _load_spec(args)
        if args.command == "svg" and spec.k not in (1, 2):
            raise ValidationError("no figure is drawn for k = 3")
        session = Session(spec, args.contraction, args.harmonic_basis, base)
        emits = tuple(args.emit or spec.emit)
        try:
            report, files = run_subcommand(args.command, session, args)
        except _Partial as partial:
            _write(partial.report, partial.files, args, emits, out)
            err.write(f"error: {partial.cause}\n")
            return partial.cause.exit_code
        _write(report, files, args, emits, out)
        return 0
    except ToricResError as exc:
        err.write(f"error: {exc}\n")
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
