from __future__ import annotations

import random
from fractions import Fraction

from toricscore import (
    DeformedEuler,
    Polynomial,
    ToricVariety,
    hirzebruch,
    product_of_projective_spaces,
    projective_space,
)
from toricscore.linalg import det, inverse, transpose

FANS = {
    "P2": lambda: projective_space(2),
    "P3": lambda: projective_space(3),
    "P4": lambda: projective_space(4),
    "P5": lambda: projective_space(5),
    "P1xP1": lambda: product_of_projective_spaces(1, 1),
    "F1": lambda: hirzebruch(1),
    "F2": lambda: hirzebruch(2),
    "P2xP2": lambda: product_of_projective_spaces(2, 2),
    "P1xP2": lambda: product_of_projective_spaces(1, 2),
}

_VARIETIES: dict[str, ToricVariety] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: end-to-end acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    verdicts: dict[int, list] = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            if getattr(rep, "when", "call") != "call" and outcome != "error":
                continue
            for key, value in getattr(rep, "user_properties", []):
                if key == "criterion":
                    number, title = value
                    verdicts.setdefault(number, [title, True])
                    if outcome != "passed":
                        verdicts[number][1] = False
    if not verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(verdicts):
        title, ok = verdicts[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")


def variety(name: str) -> ToricVariety:
    if name not in _VARIETIES:
        _VARIETIES[name] = ToricVariety.from_fan(FANS[name]())
    return _VARIETIES[name]


# -- independent intersection oracle --------------------------------------------
#
# Moves self-intersections off a cone with a single linear relation at a time
# (the classical displacement recursion).  It never builds a quotient ring, so
# it is independent of the graded normal-form engine.

def displacement_intersection(fan, exponent) -> Fraction:
    faces = fan.faces()
    n = fan.dim

    def rec(e, depth):
        if depth > 60:
            raise RecursionError("displacement did not terminate")
        support = frozenset(i for i, a in enumerate(e) if a)
        if support not in faces:
            return Fraction(0)
        if all(a <= 1 for a in e):
            assert sum(e) == n
            return Fraction(1)
        rho = min(i for i, a in enumerate(e) if a >= 2)
        sigma = next(c for c in fan.max_cones if support <= set(c))
        basis = [list(fan.rays[i]) for i in sigma]
        m = inverse(transpose(basis))[sigma.index(rho)]
        total = Fraction(0)
        for other in range(fan.nrays):
            if other in sigma:
                continue
            coeff = sum(a * b for a, b in zip(m, fan.rays[other]))
            if coeff:
                e2 = list(e)
                e2[rho] -= 1
                e2[other] += 1
                total -= coeff * rec(tuple(e2), depth + 1)
        return total

    return rec(tuple(exponent), 0)


def divisor_monomial(nrays, rays_list):
    e = [0] * nrays
    for r in rays_list:
        e[r] += 1
    return tuple(e)


# -- random data ------------------------------------------------------------------

def small_rational(rng: random.Random, nonzero=False) -> Fraction:
    while True:
        q = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
        if q or not nonzero:
            return q


def random_class_polynomial(V: ToricVariety, cls, rng: random.Random, min_terms=2) -> Polynomial:
    monos = V.monomials_of_class(cls)
    k = min(len(monos), max(min_terms, rng.randint(min_terms, 5)))
    chosen = rng.sample(monos, k)
    return Polynomial(V.nrays, {e: small_rational(rng, nonzero=True) for e in chosen})


def random_block_deformation(V: ToricVariety, rng: random.Random, scale=1) -> DeformedEuler:
    """Class-compatible deformation that is block-complete on every test fan used here
    (each primitive collection's class parts are whole class blocks)."""
    entries = []
    for rho in range(V.nrays):
        for col in range(V.nrays):
            if V.degrees[rho] != V.degrees[col]:
                continue
            w = [small_rational(rng) * scale for _ in range(V.rank)]
            if rho == col:
                w = [Fraction(d) + x for d, x in zip(V.degrees[rho], w)]
            entries.append((rho, col, w))
    return DeformedEuler.from_entries(V, entries)


def scalar_block_deformation(V: ToricVariety, matrices: dict) -> DeformedEuler:
    """``w(rho, rho') = A_c[rho][rho'] * c`` inside each class block c."""
    blocks: dict[tuple, list[int]] = {}
    for rho, d in enumerate(V.degrees):
        blocks.setdefault(d, []).append(rho)
    entries = []
    for c, rays in blocks.items():
        A = matrices.get(c)
        for i, rho in enumerate(rays):
            for j, col in enumerate(rays):
                a = Fraction(int(i == j)) if A is None else Fraction(A[i][j])
                if a:
                    entries.append((rho, col, [a * x for x in c]))
    return DeformedEuler.from_entries(V, entries)


def adapted_jacobian(V: ToricVariety, matrices: dict, f: Polynomial) -> list[Polynomial]:
    """J with E∘J = class(f) * f for :func:`scalar_block_deformation` data:
    on each block, J = A^{-T} grad f."""
    blocks: dict[tuple, list[int]] = {}
    for rho, d in enumerate(V.degrees):
        blocks.setdefault(d, []).append(rho)
    J = [Polynomial.zero(V.nrays)] * V.nrays
    for c, rays in blocks.items():
        A = matrices.get(c)
        grad = [f.derivative(r) for r in rays]
        if A is None:
            for r, g in zip(rays, grad):
                J[r] = g
            continue
        AinvT = inverse(transpose([[Fraction(v) for v in row] for row in A]))
        for i, r in enumerate(rays):
            p = Polynomial.zero(V.nrays)
            for j, g in enumerate(grad):
                p = p + g.scale(AinvT[i][j])
            J[r] = p
    return J


def random_invertible(rng: random.Random, k: int, scale=Fraction(1, 3)):
    while True:
        A = [[Fraction(int(i == j)) + scale * small_rational(rng) for j in range(k)] for i in range(k)]
        if det(A):
            return A

