"""Sparse multivariate polynomials with rational coefficients.

Terms are stored as ``exponent tuple -> Fraction``.  The monomial order is
graded lexicographic on variable index (``x0 > x1 > ...``) everywhere in the
package, so leading terms, division and printed output are reproducible.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Iterable, Iterator, Mapping, Sequence

from toricscore.errors import VariableMismatchError

Exponent = tuple[int, ...]


def grlex_key(exponent: Exponent) -> tuple[int, Exponent]:
    return (sum(exponent), exponent)


def monomials_of_degree(nvars: int, degree: int) -> list[Exponent]:
    """All exponent vectors of the given total degree, largest first in grlex."""
    if degree < 0:
        return []
    if nvars == 0:
        return [()] if degree == 0 else []
    out = []
    for combo in combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    out.sort(key=grlex_key, reverse=True)
    return out


class Polynomial:
    """Immutable polynomial in ``nvars`` variables over Q."""

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Sequence[int], object] | Iterable = ()):
        self.nvars = nvars
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[Exponent, Fraction] = {}
        for exp, coeff in items:
            exp = tuple(int(a) for a in exp)
            if len(exp) != nvars:
                raise VariableMismatchError(
                    f"exponent {exp} has length {len(exp)}, expected {nvars}")
            if any(a < 0 for a in exp):
                raise ValueError(f"negative exponent in {exp}")
            c = clean.get(exp, Fraction(0)) + Fraction(coeff)
            if c:
                clean[exp] = c
            else:
                clean.pop(exp, None)
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, nvars: int, terms: dict[Exponent, Fraction]) -> "Polynomial":
        # terms must already be clean (no zero coefficients)
        p = cls.__new__(cls)
        p.nvars = nvars
        p._terms = terms
        p._hash = None
        return p

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, nvars: int, c) -> "Polynomial":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def one(cls, nvars: int) -> "Polynomial":
        return cls.constant(nvars, 1)

    @classmethod
    def variable(cls, index: int, nvars: int) -> "Polynomial":
        e = [0] * nvars
        e[index] = 1
        return cls._raw(nvars, {tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, exponent: Sequence[int], coeff=1) -> "Polynomial":
        return cls(len(exponent), {tuple(exponent): coeff})

    @classmethod
    def linear_form(cls, coefficients: Sequence) -> "Polynomial":
        n = len(coefficients)
        return cls(n, [(tuple(int(i == j) for j in range(n)), c) for i, c in enumerate(coefficients)])

    # -- inspection ---------------------------------------------------------

    @property
    def terms(self) -> dict[Exponent, Fraction]:
        return dict(self._terms)

    def items(self) -> list[tuple[Exponent, Fraction]]:
        """Terms sorted from the grlex-largest monomial down."""
        return sorted(self._terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def __iter__(self) -> Iterator[tuple[Exponent, Fraction]]:
        return iter(self.items())

    def __len__(self) -> int:
        return len(self._terms)

    def coefficient(self, exponent: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(exponent), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self._terms}) <= 1

    def constant_value(self) -> Fraction | None:
        """The coefficient if the polynomial is a constant, else None."""
        if not self._terms:
            return Fraction(0)
        if len(self._terms) == 1:
            (e, c), = self._terms.items()
            if not any(e):
                return c
        return None

    def leading_term(self) -> tuple[Exponent, Fraction]:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self._terms, key=grlex_key)
        return e, self._terms[e]

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other: "Polynomial") -> None:
        if other.nvars != self.nvars:
            raise VariableMismatchError(
                f"polynomials in {self.nvars} and {other.nvars} variables")

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        return Polynomial.constant(self.nvars, Fraction(other))

    def __add__(self, other) -> "Polynomial":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Polynomial._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other) -> "Polynomial":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Polynomial":
        return (-self) + other

    def scale(self, c) -> "Polynomial":
        c = Fraction(c)
        if not c:
            return Polynomial.zero(self.nvars)
        return Polynomial._raw(self.nvars, {e: v * c for e, v in self._terms.items()})

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        self._check(other)
        out: dict[Exponent, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return Polynomial._raw(self.nvars, out)

    def __rmul__(self, other) -> "Polynomial":
        return self.scale(other)

    def __pow__(self, k: int) -> "Polynomial":
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative int")
        result = Polynomial.one(self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def derivative(self, index: int) -> "Polynomial":
        out = {}
        for e, c in self._terms.items():
            if e[index]:
                d = list(e)
                d[index] -= 1
                out[tuple(d)] = c * e[index]
        return Polynomial._raw(self.nvars, out)

    def substitute(self, images: Sequence["Polynomial"]) -> "Polynomial":
        """Replace variable i by ``images[i]`` (all images share one ring)."""
        if len(images) != self.nvars:
            raise VariableMismatchError("need one image per variable")
        if not images:
            return self
        target = images[0].nvars
        result = Polynomial.zero(target)
        powers: dict[tuple[int, int], Polynomial] = {}
        for e, c in self._terms.items():
            term = Polynomial.constant(target, c)
            for i, a in enumerate(e):
                if a:
                    key = (i, a)
                    if key not in powers:
                        powers[key] = images[i] ** a
                    term = term * powers[key]
            result = result + term
        return result

    # -- comparison / hashing -----------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == Polynomial.constant(self.nvars, other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    def to_string(self, names: Sequence[str] | None = None) -> str:
        if not self._terms:
            return "0"
        names = names or [f"x{i}" for i in range(self.nvars)]
        parts = []
        for e, c in self.items():
            mono = "*".join(
                names[i] if a == 1 else f"{names[i]}^{a}" for i, a in enumerate(e) if a)
            if not mono:
                body = str(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}*{mono}"
            parts.append(("- " if c < 0 else "+ ") + body)
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]

    def __str__(self) -> str:
        return self.to_string()

    def __repr__(self) -> str:
        return f"Polynomial({self.nvars}, {self.to_string()!r})"


def poly_mul(a: Polynomial, b: Polynomial) -> Polynomial:
    return a * b


def poly_exact_div(f: Polynomial, g: Polynomial) -> Polynomial | None:
    """Return ``q`` with ``q * g == f``, or None if g does not divide f.

    Long division by grlex leading terms: if g divides f, every intermediate
    remainder is a multiple of g, so its leading monomial must be divisible
    by the leading monomial of g.  The first failure proves non-divisibility.
    """
    if g.nvars != f.nvars:
        raise VariableMismatchError(f"polynomials in {f.nvars} and {g.nvars} variables")
    if g.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    lead_e, lead_c = g.leading_term()
    quotient: dict[Exponent, Fraction] = {}
    rem = f
    while not rem.is_zero():
        e, c = rem.leading_term()
        shift = tuple(a - b for a, b in zip(e, lead_e))
        if any(s < 0 for s in shift):
            return None
        t = c / lead_c
        quotient[shift] = t
        rem = rem - Polynomial._raw(f.nvars, {shift: t}) * g
    return Polynomial._raw(f.nvars, quotient)
