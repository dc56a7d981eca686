"""Degreewise normal forms in a graded quotient ``Q[y_1..y_r] / I``.

``I`` is generated by homogeneous polynomials.  For each degree ``k`` the
span of ``{g * m : deg m = k - deg g}`` is row-reduced with columns ordered
grlex-descending, so pivots sit on leading monomials and the non-pivot
(standard) monomials form a basis of the quotient in degree ``k``.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from toricscore.errors import DegenerateDeformationError, VariableMismatchError
from toricscore.linalg import rref
from toricscore.polynomial import Exponent, Polynomial, monomials_of_degree


@dataclass(frozen=True)
class _Degree:
    monomials: tuple[Exponent, ...]
    index: dict
    rows: tuple[tuple[Fraction, ...], ...]
    pivots: tuple[int, ...]

    @property
    def standard(self) -> tuple[Exponent, ...]:
        piv = set(self.pivots)
        return tuple(m for i, m in enumerate(self.monomials) if i not in piv)


class GradedQuotient:
    def __init__(self, nvars: int, generators: Sequence[Polynomial]):
        for g in generators:
            if g.nvars != nvars:
                raise VariableMismatchError("generator lives in a different ring")
            if not g.is_homogeneous():
                raise ValueError(f"generator {g} is not homogeneous")
        self.nvars = nvars
        self.generators = tuple(g for g in generators if not g.is_zero())
        self._cache: dict[int, _Degree] = {}
        self._lock = threading.Lock()

    def _degree(self, k: int) -> _Degree:
        hit = self._cache.get(k)
        if hit is not None:
            return hit
        with self._lock:
            if k not in self._cache:
                self._cache[k] = self._build(k)
            return self._cache[k]

    def _build(self, k: int) -> _Degree:
        monos = tuple(monomials_of_degree(self.nvars, k))
        index = {m: i for i, m in enumerate(monos)}
        spanning = []
        for g in self.generators:
            d = g.degree
            for m in monomials_of_degree(self.nvars, k - d):
                row = [Fraction(0)] * len(monos)
                for e, c in g.items():
                    row[index[tuple(a + b for a, b in zip(e, m))]] = c
                spanning.append(row)
        if spanning:
            R, pivots = rref(spanning)
        else:
            R, pivots = [], []
        return _Degree(monos, index, tuple(tuple(r) for r in R), tuple(pivots))

    def dimension(self, k: int) -> int:
        D = self._degree(k)
        return len(D.monomials) - len(D.pivots)

    def dimensions(self, top: int) -> list[int]:
        return [self.dimension(k) for k in range(top + 1)]

    def standard_monomials(self, k: int) -> tuple[Exponent, ...]:
        return self._degree(k).standard

    def ideal_basis(self, k: int) -> list[Polynomial]:
        """A basis of ``I_k`` (the reduced rows as polynomials)."""
        D = self._degree(k)
        return [Polynomial(self.nvars, zip(D.monomials, row)) for row in D.rows]

    def normal_form(self, p: Polynomial) -> Polynomial:
        """Unique representative of ``p`` supported on standard monomials."""
        if p.nvars != self.nvars:
            raise VariableMismatchError("polynomial lives in a different ring")
        if p.is_zero():
            return p
        if not p.is_homogeneous():
            out = Polynomial.zero(self.nvars)
            for k in sorted({sum(e) for e, _ in p.items()}):
                out = out + self.normal_form(
                    Polynomial(self.nvars, [(e, c) for e, c in p.items() if sum(e) == k]))
            return out
        D = self._degree(p.degree)
        vec = [Fraction(0)] * len(D.monomials)
        for e, c in p.items():
            vec[D.index[e]] = c
        for row, c in zip(D.rows, D.pivots):
            f = vec[c]
            if f:
                vec = [a - f * b for a, b in zip(vec, row)]
        return Polynomial(self.nvars, zip(D.monomials, vec))

    def contains(self, p: Polynomial) -> bool:
        return self.normal_form(p).is_zero()

    def top_ratio(self, p: Polynomial, reference: Polynomial, top: int) -> Fraction:
        """Coordinate of ``p`` in the one-dimensional degree ``top`` with ``reference -> 1``."""
        if self.dimension(top) != 1:
            raise DegenerateDeformationError(
                f"top-degree quotient has dimension {self.dimension(top)}, expected 1")
        (std,) = self.standard_monomials(top)
        ref = self.normal_form(reference).coefficient(std)
        if not ref:
            raise DegenerateDeformationError("reference element lies in the ideal")
        if p.is_zero():
            return Fraction(0)
        if p.degree != top or not p.is_homogeneous():
            raise ValueError(f"expected a homogeneous element of degree {top}")
        return self.normal_form(p).coefficient(std) / ref
