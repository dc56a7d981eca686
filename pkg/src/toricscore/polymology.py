"""Deformed toric Euler data and the polymology ring ``Sym W / SR(V, E)``.

W has the Pic basis fixed by :func:`toricscore.toric.class_group`; its
coordinate functions are the variables ``psi_1..psi_r`` of Sym W.  A
deformation is stored as the W-valued coefficients ``w(rho, rho')`` of the
linear sections ``E_rho = sum_rho' x_rho' * w(rho, rho')``.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from toricscore.errors import (
    ArityError,
    ClassCompatibilityError,
    NotBlockCompleteError,
)
from toricscore.graded import GradedQuotient
from toricscore.polynomial import Polynomial
from toricscore.toric import ToricVariety, betti_numbers

WVector = tuple  # r Fractions


def w_vector(values: Sequence, rank: int) -> WVector:
    if len(values) != rank:
        raise ArityError(f"W-vector has length {len(values)}, expected {rank}")
    return tuple(Fraction(v) for v in values)


def linear_form(w: Sequence) -> Polynomial:
    """The element of Sym^1 W with the given coordinates."""
    return Polynomial.linear_form(list(w))


def sym_product(vectors: Sequence[Sequence], rank: int) -> Polynomial:
    out = Polynomial.one(rank)
    for v in vectors:
        out = out * linear_form(w_vector(v, rank))
    return out


@dataclass(frozen=True)
class DeformedEuler:
    nrays: int
    rank: int
    coefficients: tuple  # sorted ((row, col), w) with w != 0

    @classmethod
    def from_entries(cls, V: ToricVariety, entries: Iterable) -> "DeformedEuler":
        """Build from ``(row_ray, col_ray, w)`` triples; repeated positions are an error."""
        table: dict[tuple[int, int], WVector] = {}
        for row, col, w in entries:
            row, col = int(row), int(col)
            if not (0 <= row < V.nrays and 0 <= col < V.nrays):
                raise ClassCompatibilityError(f"entry ({row}, {col}) references an unknown ray")
            if (row, col) in table:
                raise ValueError(f"duplicate deformation entry ({row}, {col})")
            w = w_vector(w, V.rank)
            if any(w) and V.degrees[row] != V.degrees[col]:
                raise ClassCompatibilityError(
                    f"w({row},{col}) couples rays of classes {V.degrees[row]} and {V.degrees[col]}")
            if any(w):
                table[(row, col)] = w
        return cls(V.nrays, V.rank, tuple(sorted(table.items())))

    def w(self, row: int, col: int) -> WVector:
        return dict(self.coefficients).get((row, col), (Fraction(0),) * self.rank)

    def section(self, row: int) -> list[tuple[int, WVector]]:
        return [(c, w) for (r, c), w in self.coefficients if r == row]

    def section_coordinate(self, row: int, a: int) -> Polynomial:
        """Coordinate ``a`` of ``E_row`` as a linear Cox polynomial."""
        return Polynomial(self.nrays, [
            (tuple(int(i == c) for i in range(self.nrays)), w[a]) for c, w in self.section(row)])

    def entries(self) -> list[tuple[int, int, WVector]]:
        return [(r, c, w) for (r, c), w in self.coefficients]

    def is_undeformed(self, V: ToricVariety) -> bool:
        return self == undeformed_euler(V)


def undeformed_euler(V: ToricVariety) -> DeformedEuler:
    return DeformedEuler.from_entries(V, [(rho, rho, V.degrees[rho]) for rho in range(V.nrays)])


def class_blocks(V: ToricVariety) -> dict[tuple, tuple[int, ...]]:
    blocks: dict[tuple, list[int]] = {}
    for rho, d in enumerate(V.degrees):
        blocks.setdefault(d, []).append(rho)
    return {d: tuple(v) for d, v in sorted(blocks.items())}


def _check_shape(V: ToricVariety, E: DeformedEuler) -> None:
    if E.nrays != V.nrays or E.rank != V.rank:
        raise ArityError("deformation was built for a different variety")
    for (r, c), _ in E.coefficients:
        if V.degrees[r] != V.degrees[c]:
            raise ClassCompatibilityError(f"w({r},{c}) couples rays of different classes")


def _collection_parts(V: ToricVariety, K: Sequence[int]) -> list[tuple[tuple, tuple[int, ...]]]:
    parts: dict[tuple, list[int]] = {}
    for rho in K:
        parts.setdefault(V.degrees[rho], []).append(rho)
    return [(d, tuple(v)) for d, v in sorted(parts.items())]


def _check_block_complete(V: ToricVariety, E: DeformedEuler) -> None:
    blocks = class_blocks(V)
    for K in V.primitive_collections:
        for d, part in _collection_parts(V, K):
            outside = set(blocks[d]) - set(part)
            for rho in part:
                for col, _ in E.section(rho):
                    if col in outside:
                        raise NotBlockCompleteError(
                            f"w({rho},{col}) mixes primitive collection {list(K)} "
                            f"with ray {col} outside it")


def poly_det(M: Sequence[Sequence[Polynomial]], nvars: int) -> Polynomial:
    """Determinant of a square polynomial matrix by memoised Laplace expansion."""
    n = len(M)
    memo: dict[tuple[int, frozenset], Polynomial] = {}

    def minor(row: int, cols: frozenset) -> Polynomial:
        if row == n:
            return Polynomial.one(nvars)
        key = (row, cols)
        if key in memo:
            return memo[key]
        total = Polynomial.zero(nvars)
        for pos, c in enumerate(sorted(cols)):
            if M[row][c].is_zero():
                continue
            term = M[row][c] * minor(row + 1, cols - {c})
            total = total - term if pos % 2 else total + term
        memo[key] = total
        return total

    return minor(0, frozenset(range(n)))


@dataclass(frozen=True)
class SRIdeal:
    generators: tuple[Polynomial, ...]
    collections: tuple[tuple[int, ...], ...]
    factors: tuple[tuple[Polynomial, ...], ...]  # per-class determinants of each generator


def _block_factors(V: ToricVariety, E: DeformedEuler, K: Sequence[int]) -> tuple[Polynomial, ...]:
    out = []
    for _, part in _collection_parts(V, K):
        M = [[linear_form(E.w(rho, col)) for col in part] for rho in part]
        out.append(poly_det(M, V.rank))
    return tuple(out)


def sr_ideal(V: ToricVariety, E: DeformedEuler) -> SRIdeal:
    """One generator per primitive collection: the product over divisor classes of
    the determinants of the collection's class blocks."""
    _check_shape(V, E)
    _check_block_complete(V, E)
    gens, factors = [], []
    for K in V.primitive_collections:
        fs = _block_factors(V, E, K)
        g = Polynomial.one(V.rank)
        for f in fs:
            g = g * f
        gens.append(g)
        factors.append(fs)
    return SRIdeal(tuple(gens), tuple(V.primitive_collections), tuple(factors))


class PolymologyRing:
    """``Sym W / SR(V, E)`` with degreewise normal forms and the top-degree evaluation."""

    def __init__(self, V: ToricVariety, E: DeformedEuler):
        self.V = V
        self.E = E
        self.ideal = sr_ideal(V, E)
        self.quotient = GradedQuotient(V.rank, self.ideal.generators)
        self.reference = sym_product([V.degrees[rho] for rho in V.reference], V.rank)

    def dims(self) -> list[int]:
        return self.quotient.dimensions(self.V.dim)

    def normal_form(self, s: Polynomial) -> Polynomial:
        return self.quotient.normal_form(s)

    def eval_top(self, s: Polynomial) -> Fraction:
        n = self.V.dim
        if s.nvars != self.V.rank:
            raise ArityError(f"Sym W element in {s.nvars} variables, expected {self.V.rank}")
        if not s.is_zero() and (s.degree != n or not s.is_homogeneous()):
            raise ArityError(f"eval_top needs a homogeneous element of degree {n}")
        return self.quotient.top_ratio(s, self.reference, n)


_RINGS: dict[tuple, PolymologyRing] = {}
_RINGS_LOCK = threading.Lock()


def polymology_ring(V: ToricVariety, E: DeformedEuler) -> PolymologyRing:
    key = (V, E)
    ring = _RINGS.get(key)
    if ring is None:
        with _RINGS_LOCK:
            ring = _RINGS.get(key)
            if ring is None:
                ring = _RINGS[key] = PolymologyRing(V, E)
    return ring


def quotient_dims(V: ToricVariety, E: DeformedEuler) -> list[int]:
    return polymology_ring(V, E).dims()


def eval_top(V: ToricVariety, E: DeformedEuler, s: Polynomial) -> Fraction:
    return polymology_ring(V, E).eval_top(s)


def product_V(V: ToricVariety, E: DeformedEuler, sigmas: Sequence[Sequence]) -> Fraction:
    """``<sigma_1, ..., sigma_n>_V`` for W-vectors ``sigma_i``."""
    if len(sigmas) != V.dim:
        raise ArityError(f"expected {V.dim} classes, got {len(sigmas)}")
    return eval_top(V, E, sym_product(sigmas, V.rank))


@dataclass
class DeformationReport:
    block_complete: bool
    nondegenerate: bool
    dimension_valid: bool
    dims: list[int]
    betti: list[int]
    undeformed: bool
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def as_dict(self) -> dict:
        return {
            "block_complete": self.block_complete,
            "nondegenerate": self.nondegenerate,
            "dimension_valid": self.dimension_valid,
            "dims": list(self.dims),
            "betti": list(self.betti),
            "undeformed": self.undeformed,
            "failures": list(self.failures),
        }


def validate_deformation(V: ToricVariety, E: DeformedEuler) -> DeformationReport:
    """Raises on class-compatibility or block-completeness violations; other
    problems are reported as failed flags."""
    _check_shape(V, E)
    _check_block_complete(V, E)
    ring = polymology_ring(V, E)
    nondegenerate = all(not f.is_zero() for fs in ring.ideal.factors for f in fs)
    dims = ring.dims()
    betti = betti_numbers(V.fan)
    failures = []
    if not nondegenerate:
        failures.append("nondegenerate")
    if dims != betti:
        failures.append("dimension")
    return DeformationReport(True, nondegenerate, dims == betti, dims, betti,
                             E.is_undeformed(V), failures)
