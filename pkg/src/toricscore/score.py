"""Complete intersections in V and the restriction formula for their products.

Each hypersurface is given by its section ``f`` and a lift ``J`` of the monad
map (one Cox polynomial per ray).  ``E∘J`` must equal ``gamma * f`` on V for a
constant ``gamma`` in W; the product of ``n - m`` classes on the complete
intersection is then the product on V with ``gamma_1..gamma_m`` inserted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Mapping, Sequence

from toricscore.errors import (
    ArityError,
    ClassMismatchError,
    DivisibilityError,
    HypothesisError,
    NonConstantQuotientError,
)
from toricscore.polymology import DeformedEuler, WVector, linear_form, polymology_ring, sym_product, w_vector
from toricscore.polynomial import Polynomial, poly_exact_div
from toricscore.toric import ToricVariety

H1_WARNING = "hypothesis H^1(E*_X_k) = W unverified"
COMPLETENESS_WARNING = "fan completeness unverified"


def codimension_warning(m: int, n: int) -> str:
    return f"hypothesis m <= n-3 violated (m={m}, n={n})"


@dataclass(frozen=True)
class HypersurfaceData:
    f: Polynomial
    J: tuple[Polynomial, ...]
    label: str
    divisor_class: tuple[int, ...]

    def is_jacobian(self) -> bool:
        return all(j == self.f.derivative(rho) for rho, j in enumerate(self.J))


def make_hypersurface(V: ToricVariety, f: Polynomial,
                      J: Sequence[Polynomial] | Mapping[int, Polynomial],
                      label: str = "X") -> HypersurfaceData:
    """Check classes: ``f`` of class H, each nonzero ``J_rho`` of class ``H - deg D_rho``."""
    if f.is_zero():
        raise ClassMismatchError(f"{label}: defining section is zero")
    H = V.class_of(f)
    if isinstance(J, Mapping):
        J = [J.get(rho, Polynomial.zero(V.nrays)) for rho in range(V.nrays)]
    J = tuple(J)
    if len(J) != V.nrays:
        raise ArityError(f"{label}: J has {len(J)} entries, expected {V.nrays}")
    for rho, j in enumerate(J):
        if j.nvars != V.nrays:
            raise ClassMismatchError(f"{label}: J[{rho}] is in the wrong number of variables")
        if j.is_zero():
            continue
        want = tuple(h - d for h, d in zip(H, V.degrees[rho]))
        try:
            got = V.class_of(j)
        except ClassMismatchError as exc:
            raise ClassMismatchError(f"{label}: J[{rho}]: {exc}") from None
        if got != want:
            raise ClassMismatchError(f"{label}: J[{rho}] has class {got}, expected {want}")
    return HypersurfaceData(f, J, label, H)


def default_jacobian_J(V: ToricVariety, f: Polynomial, label: str = "X") -> HypersurfaceData:
    return make_hypersurface(V, f, [f.derivative(rho) for rho in range(V.nrays)], label)


def compose_EJ(V: ToricVariety, E: DeformedEuler, hyp: HypersurfaceData) -> list[Polynomial]:
    """Coordinates ``p_a = sum_rho J_rho * (E_rho)_a`` of ``E∘J``."""
    out = []
    for a in range(V.rank):
        p = Polynomial.zero(V.nrays)
        for rho, j in enumerate(hyp.J):
            if not j.is_zero():
                p = p + j * E.section_coordinate(rho, a)
        out.append(p)
    return out


def extract_gamma(V: ToricVariety, E: DeformedEuler, hyp: HypersurfaceData) -> WVector:
    """The constant ``gamma`` with ``E∘J = gamma * f``."""
    gamma = []
    for a, p in enumerate(compose_EJ(V, E, hyp)):
        q = poly_exact_div(p, hyp.f)
        if q is None:
            raise DivisibilityError(
                f"{hyp.label}: coordinate {a} of E∘J is not divisible by f", a, p)
        c = q.constant_value()
        if c is None:
            raise NonConstantQuotientError(
                f"{hyp.label}: coordinate {a} of E∘J / f = {q} is not constant")
        gamma.append(c)
    return tuple(gamma)


@dataclass(frozen=True)
class CompleteIntersectionData:
    hypersurfaces: tuple[HypersurfaceData, ...]
    gammas: tuple[WVector, ...]

    @property
    def m(self) -> int:
        return len(self.hypersurfaces)


def complete_intersection(V: ToricVariety, E: DeformedEuler,
                          hypersurfaces: Sequence[HypersurfaceData]) -> CompleteIntersectionData:
    hyps = tuple(hypersurfaces)
    return CompleteIntersectionData(hyps, tuple(extract_gamma(V, E, h) for h in hyps))


@dataclass
class EvalReport:
    value: Fraction
    inserted_gammas: list[WVector]
    certificate: Polynomial
    normal_form: Polynomial
    warnings: list[str] = field(default_factory=list)


def hypothesis_warnings(V: ToricVariety, E: DeformedEuler, ci: CompleteIntersectionData) -> list[str]:
    n, m = V.dim, ci.m
    warnings = []
    if m > n - 3:
        warnings.append(codimension_warning(m, n))
    # Lefschetz covers the undeformed case once every X_k has dimension >= 3.
    undeformed = E.is_undeformed(V) and all(h.is_jacobian() for h in ci.hypersurfaces)
    if m and (not undeformed or m > n - 3):
        warnings.append(H1_WARNING)
    if V.report is not None and V.report.complete != "asserted":
        warnings.append(COMPLETENESS_WARNING)
    return warnings


def score_product(V: ToricVariety, E: DeformedEuler, ci: CompleteIntersectionData,
                  sigmas: Sequence[Sequence], *,
                  allow_hypothesis_violations: bool = True) -> EvalReport:
    """``<sigma_1..sigma_{n-m}>_X = <sigma_1..sigma_{n-m}, gamma_1..gamma_m>_V``."""
    n, m = V.dim, ci.m
    if len(sigmas) != n - m:
        raise ArityError(f"expected {n - m} classes on a codimension-{m} intersection, got {len(sigmas)}")
    warnings = hypothesis_warnings(V, E, ci)
    if m > n - 3 and not allow_hypothesis_violations:
        raise HypothesisError(codimension_warning(m, n))
    vectors = [w_vector(s, V.rank) for s in sigmas] + list(ci.gammas)
    ring = polymology_ring(V, E)
    cert = sym_product(vectors, V.rank)
    value = ring.eval_top(cert)
    return EvalReport(value, list(ci.gammas), cert, ring.normal_form(cert), warnings)


@dataclass
class InsertionTrace:
    order: tuple[int, ...]
    partials: list[Polynomial]
    value: Fraction


@dataclass
class ConsistencyReport:
    one_shot: Fraction
    traces: list[InsertionTrace]

    @property
    def consistent(self) -> bool:
        return all(t.value == self.one_shot for t in self.traces)


def restriction_consistency_check(V: ToricVariety, E: DeformedEuler,
                                  ci: CompleteIntersectionData,
                                  sigmas: Sequence[Sequence]) -> ConsistencyReport:
    """Insert the gammas one at a time, reducing to normal form after every step,
    in every order; each final value must match the one-shot insertion."""
    ring = polymology_ring(V, E)
    one_shot = score_product(V, E, ci, sigmas).value
    start = ring.normal_form(sym_product(sigmas, V.rank))
    traces = []
    for order in permutations(range(ci.m)):
        cur, partials = start, []
        for k in order:
            cur = ring.normal_form(cur * linear_form(ci.gammas[k]))
            partials.append(cur)
        traces.append(InsertionTrace(order, partials, ring.eval_top(cur)))
    return ConsistencyReport(one_shot, traces)
