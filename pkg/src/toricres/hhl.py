"""The cellular complex of line bundles attached to a stratification."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional

from .errors import NotAComplex
from .polyring import Poly, PolyMatrix
from .strat import Quadruple, Stratification, enumerate_cells


@dataclass(frozen=True)
class Generator:
    """One summand ``O(-a)`` of a term of a complex."""
    name: str
    a: tuple
    cell: Optional[int] = None
    class_id: Optional[object] = None


@dataclass
class LineBundleComplex:
    """Terms ``terms[i]`` in homological degree ``i`` and ``d[i]: terms[i] -> terms[i-1]``."""
    n: int
    terms: List[List[Generator]]
    d: Dict[int, PolyMatrix]
    names: tuple = ()
    strat: Optional[Stratification] = field(default=None, repr=False)

    @property
    def length(self) -> int:
        return len(self.terms) - 1

    def ranks(self) -> tuple:
        return tuple(len(t) for t in self.terms)

    def differential(self, i: int) -> PolyMatrix:
        if i in self.d:
            return self.d[i]
        rows = len(self.terms[i - 1]) if 0 < i <= len(self.terms) else 0
        cols = len(self.terms[i]) if 0 <= i < len(self.terms) else 0
        return PolyMatrix.zeros(rows, cols, self.n)


def monomial(eps) -> Poly:
    return Poly.monomial(eps)


def build_hhl_complex(q: Quadruple, strat: Optional[Stratification] = None) -> LineBundleComplex:
    """Entry ``(tau, sigma)`` of ``d`` is the sum of ``sign * x^eps`` over facet lifts."""
    strat = strat or enumerate_cells(q)
    terms = [[Generator(c.name, c.ceiling, c.id) for c in strat.by_dim(i)]
             for i in range(q.k + 1)]
    pos = {g.cell: j for t in terms for j, g in enumerate(t)}
    d = {}
    for i in range(1, q.k + 1):
        entries: Dict[tuple, Poly] = {}
        for col, g in enumerate(terms[i]):
            for inc in strat.incidences[g.cell]:
                key = (pos[inc.child], col)
                term = Poly.monomial(inc.epsilon, inc.sign)
                entries[key] = entries[key] + term if key in entries else term
        d[i] = PolyMatrix(len(terms[i - 1]), len(terms[i]), q.n, entries)
    return LineBundleComplex(q.n, terms, d, q.variable_names, strat)


def verify_complex(C: LineBundleComplex) -> dict:
    """Check ``d_{i} d_{i+1} == 0``; raise :class:`NotAComplex` with a witness."""
    checked = []
    for i in range(1, C.length):
        prod = C.differential(i) @ C.differential(i + 1)
        if not prod.is_zero():
            (r, c), p = min(prod.entries.items())
            raise NotAComplex(
                f"d_{i} d_{i + 1} != 0 at entry ({r}, {c}): {p.to_text(C.names)}",
                degree=i, entry=(r, c))
        checked.append(i)
    return {"ok": True, "checked_degrees": checked}
