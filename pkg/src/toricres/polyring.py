"""Multivariate polynomials over Q and sparse matrices of them."""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Mapping, Optional, Sequence

from .ratlin import RatMatrix, _frac


class Poly:
    """Polynomial in ``n`` variables: exponent tuple -> nonzero Fraction."""

    __slots__ = ("n", "terms", "_hash")

    def __init__(self, n: int, terms: Optional[Mapping] = None):
        self.n = n
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != n:
                raise ValueError(f"exponent {e} has length != {n}")
            c = _frac(c)
            if c:
                clean[e] = clean.get(e, Fraction(0)) + c
                if not clean[e]:
                    del clean[e]
        self.terms: Dict[tuple, Fraction] = clean
        self._hash = None

    @classmethod
    def _raw(cls, n, terms):
        p = cls.__new__(cls)
        p.n = n
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def const(cls, n: int, c) -> "Poly":
        return cls(n, {(0,) * n: c})

    @classmethod
    def monomial(cls, exps: Sequence[int], c=1) -> "Poly":
        return cls(len(exps), {tuple(exps): c})

    @classmethod
    def var(cls, n: int, i: int) -> "Poly":
        e = [0] * n
        e[i] = 1
        return cls(n, {tuple(e): 1})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.n == other.n and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == ({(0,) * self.n: Fraction(other)} if other else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self.terms.items())))
        return self._hash

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.n != self.n:
                raise ValueError("polynomials live in different rings")
            return other
        return Poly.const(self.n, other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Poly._raw(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "Poly":
        c = _frac(c)
        if not c:
            return Poly._raw(self.n, {})
        return Poly._raw(self.n, {e: c * v for e, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        out: Dict[tuple, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e, 0) + c1 * c2
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return Poly._raw(self.n, out)

    def __rmul__(self, other):
        return self * other

    def __pow__(self, k: int):
        out = Poly.const(self.n, 1)
        for _ in range(k):
            out = out * self
        return out

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.n, Fraction(0))

    def substitute(self, assignment: Mapping[int, "Poly"]) -> "Poly":
        """Replace variable ``i`` by ``assignment[i]``; unlisted variables stay."""
        out = Poly(self.n)
        for e, c in self.terms.items():
            term = Poly.const(self.n, c)
            keep = list(e)
            for i, p in assignment.items():
                if e[i]:
                    term = term * (self._coerce(p) ** e[i])
                    keep[i] = 0
            term = term * Poly.monomial(keep)
            out = out + term
        return out

    def evaluate(self, point: Sequence) -> Fraction:
        total = Fraction(0)
        for e, c in self.terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v *= _frac(x) ** k
            total += v
        return total

    def sorted_terms(self):
        # graded lex: higher total degree first, then lex on exponents (descending)
        return sorted(self.terms.items(), key=lambda t: (-sum(t[0]), tuple(-x for x in t[0])))

    def to_text(self, names: Optional[Sequence[str]] = None) -> str:
        """Canonical text ``c*x1^e1*...``; coefficients written as ``p/q``."""
        if not self.terms:
            return "0"
        names = names or [f"x{i + 1}" for i in range(self.n)]
        parts = []
        for e, c in self.sorted_terms():
            factors = []
            for name, k in zip(names, e):
                if k == 1:
                    factors.append(name)
                elif k > 1:
                    factors.append(f"{name}^{k}")
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if factors:
                body = "*".join(factors) if a == 1 else f"{a}*" + "*".join(factors)
            else:
                body = str(a)
            parts.append((sign, body))
        head_sign, head = parts[0]
        text = ("-" if head_sign == "-" else "") + head
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self):
        return f"Poly({self.to_text()})"


def parse_poly(text: str, names: Sequence[str]) -> Poly:
    """Inverse of :meth:`Poly.to_text` (sums of signed monomials only)."""
    n = len(names)
    index = {name: i for i, name in enumerate(names)}
    s = text.replace(" ", "")
    if s in ("", "0"):
        return Poly(n)
    if s[0] not in "+-":
        s = "+" + s
    out = Poly(n)
    i = 0
    while i < len(s):
        sign = -1 if s[i] == "-" else 1
        j = i + 1
        while j < len(s) and s[j] not in "+-":
            j += 1
        term = s[i + 1:j]
        coeff = Fraction(sign)
        exps = [0] * n
        for factor in term.split("*"):
            if not factor:
                raise ValueError(f"bad term {term!r}")
            if factor[0].isdigit():
                coeff *= Fraction(factor)
                continue
            name, _, power = factor.partition("^")
            if name not in index:
                raise ValueError(f"unknown variable {name!r}")
            exps[index[name]] += int(power) if power else 1
        out = out + Poly.monomial(exps, coeff)
        i = j
    return out


class PolyMatrix:
    """Sparse matrix of polynomials; ``entries`` maps ``(i, j)`` to nonzero Poly."""

    __slots__ = ("rows", "cols", "n", "entries")

    def __init__(self, rows: int, cols: int, n: int, entries: Optional[Mapping] = None):
        self.rows = rows
        self.cols = cols
        self.n = n
        self.entries: Dict[tuple, Poly] = {}
        for (i, j), p in (entries or {}).items():
            if not (0 <= i < rows and 0 <= j < cols):
                raise IndexError(f"entry {(i, j)} outside {rows}x{cols}")
            if not isinstance(p, Poly):
                p = Poly.const(n, p)
            if p:
                self.entries[(i, j)] = p

    @classmethod
    def from_rat(cls, M: RatMatrix, n: int) -> "PolyMatrix":
        return cls(M.rows, M.cols, n, {(i, j): Poly.const(n, M[i, j])
                                       for i in range(M.rows) for j in range(M.cols) if M[i, j]})

    @classmethod
    def from_rows(cls, rows, n: int) -> "PolyMatrix":
        r = len(rows)
        c = len(rows[0]) if rows else 0
        return cls(r, c, n, {(i, j): p for i, row in enumerate(rows) for j, p in enumerate(row)})

    @classmethod
    def identity(cls, size: int, n: int) -> "PolyMatrix":
        return cls(size, size, n, {(i, i): Poly.const(n, 1) for i in range(size)})

    @classmethod
    def zeros(cls, rows: int, cols: int, n: int) -> "PolyMatrix":
        return cls(rows, cols, n)

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, idx) -> Poly:
        return self.entries.get(idx) or Poly(self.n)

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        out = dict(self.entries)
        for k, p in other.entries.items():
            q = out[k] + p if k in out else p
            if q:
                out[k] = q
            else:
                out.pop(k, None)
        return _pm(self.rows, self.cols, self.n, out)

    def __neg__(self):
        return _pm(self.rows, self.cols, self.n, {k: -p for k, p in self.entries.items()})

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        return self + (-other)

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        by_row: Dict[int, list] = {}
        for (k, j), p in other.entries.items():
            by_row.setdefault(k, []).append((j, p))
        out: Dict[tuple, Poly] = {}
        for (i, k), p in self.entries.items():
            for j, q in by_row.get(k, ()):
                v = p * q
                key = (i, j)
                if key in out:
                    v = out[key] + v
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
        return _pm(self.rows, other.cols, self.n, out)

    @property
    def T(self) -> "PolyMatrix":
        return _pm(self.cols, self.rows, self.n, {(j, i): p for (i, j), p in self.entries.items()})

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "PolyMatrix":
        ri = {r: a for a, r in enumerate(rows)}
        ci = {c: b for b, c in enumerate(cols)}
        return _pm(len(rows), len(cols), self.n,
                   {(ri[i], ci[j]): p for (i, j), p in self.entries.items()
                    if i in ri and j in ci})

    def scale_rows(self, factors) -> "PolyMatrix":
        return _pm(self.rows, self.cols, self.n,
                   {(i, j): p.scale(factors[i]) for (i, j), p in self.entries.items()
                    if factors[i]})

    def scale_cols(self, factors) -> "PolyMatrix":
        return _pm(self.rows, self.cols, self.n,
                   {(i, j): p.scale(factors[j]) for (i, j), p in self.entries.items()
                    if factors[j]})

    def map(self, f) -> "PolyMatrix":
        return PolyMatrix(self.rows, self.cols, self.n,
                          {k: f(p) for k, p in self.entries.items()})

    def tolist(self):
        return [[self[i, j] for j in range(self.cols)] for i in range(self.rows)]

    def to_text_rows(self, names=None):
        return [[self[i, j].to_text(names) for j in range(self.cols)] for i in range(self.rows)]

    def __repr__(self):
        return f"PolyMatrix({self.rows}x{self.cols}, {self.to_text_rows()})"


def _pm(rows, cols, n, entries) -> PolyMatrix:
    m = PolyMatrix.__new__(PolyMatrix)
    m.rows, m.cols, m.n, m.entries = rows, cols, n, entries
    return m


def matmul(A: PolyMatrix, B: PolyMatrix) -> PolyMatrix:
    return A @ B


def constant_part(A: PolyMatrix) -> RatMatrix:
    """Entrywise constant coefficient (all variables set to zero)."""
    data = [[Fraction(0)] * A.cols for _ in range(A.rows)]
    for (i, j), p in A.entries.items():
        data[i][j] = p.constant_term()
    return RatMatrix(data, A.rows, A.cols)


def substitute(p: Poly, assignment: Mapping[int, Poly]) -> Poly:
    return p.substitute(assignment)
