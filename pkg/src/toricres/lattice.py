"""The quotient Z^n / im(psi^T), in Smith normal form coordinates."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .ratlin import smith


@dataclass(frozen=True)
class ClassId:
    free: tuple
    torsion: tuple

    def __str__(self):
        parts = [str(x) for x in self.free] + [f"{x}" for x in self.torsion]
        return "[" + ",".join(parts) + "]"


class ClassGroup:
    """Reduction of integer vectors modulo the row lattice of ``psi``.

    ``psi`` is k x n of rank k, so ``psi^T`` is an injective map Z^k -> Z^n
    and the quotient is Z^(n-k) plus torsion.
    """

    def __init__(self, psi: Sequence[Sequence[int]]):
        self.k = len(psi)
        self.n = len(psi[0]) if psi else 0
        psiT = [[psi[r][c] for r in range(self.k)] for c in range(self.n)]
        self.snf = smith(psiT)
        D = self.snf.D
        self.diag = [D[j][j] for j in range(min(self.n, self.k))]
        if any(d == 0 for d in self.diag):
            raise ValueError("psi must have full row rank")

    def _y(self, a):
        return [sum(u * x for u, x in zip(row, a)) for row in self.snf.U]

    def class_of(self, a: Sequence[int]) -> ClassId:
        y = self._y(a)
        torsion = tuple(y[j] % d for j, d in enumerate(self.diag) if d > 1)
        return ClassId(tuple(y[self.k:]), torsion)

    def shift(self, a: Sequence[int], b: Sequence[int]):
        """The unique integer ``lam`` with ``b - a == psi^T lam``, or ``None``."""
        y = self._y([bb - aa for aa, bb in zip(a, b)])
        if any(y[self.k:]):
            return None
        lp = []
        for j, d in enumerate(self.diag):
            if y[j] % d:
                return None
            lp.append(y[j] // d)
        V = self.snf.V
        return tuple(sum(V[i][j] * lp[j] for j in range(self.k)) for i in range(self.k))

    @property
    def is_trivial(self) -> bool:
        return self.n == self.k and all(d == 1 for d in self.diag)
