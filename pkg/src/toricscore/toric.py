"""Fans of smooth complete toric varieties: validation, class group, primitive
collections and the classical intersection numbers."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Sequence

from toricscore.errors import ArityError, ClassGroupTorsionError, ClassMismatchError, FanError
from toricscore.graded import GradedQuotient
from toricscore.linalg import det, hermite_normal_form, inverse, matvec, smith_normal_form, solve_linear, transpose
from toricscore.polynomial import Exponent, Polynomial, grlex_key

DivisorClass = tuple  # r rationals (integers for toric divisors)


@dataclass(frozen=True)
class Fan:
    """Rays are primitive integer vectors; each maximal cone lists ``n`` ray indices."""

    rays: tuple
    max_cones: tuple

    def __post_init__(self):
        try:
            rays = tuple(tuple(int(a) for a in r) for r in self.rays)
            cones = tuple(sorted({tuple(sorted(int(i) for i in c)) for c in self.max_cones}))
        except (TypeError, ValueError) as exc:
            raise FanError(f"malformed fan: {exc}") from None
        if not rays:
            raise FanError("fan has no rays")
        n = len(rays[0])
        if n == 0:
            raise FanError("rays must have positive dimension")
        for i, r in enumerate(rays):
            if len(r) != n:
                raise FanError(f"ray {i} has dimension {len(r)}, expected {n}")
            if math.gcd(*r) != 1:
                raise FanError(f"ray {i} = {r} is not primitive")
        if len(set(rays)) != len(rays):
            raise FanError("rays are not pairwise distinct")
        for c in cones:
            if len(set(c)) != n:
                raise FanError(f"max cone {c} must have exactly {n} distinct rays")
            if any(not 0 <= i < len(rays) for i in c):
                raise FanError(f"max cone {c} references an unknown ray")
        object.__setattr__(self, "rays", rays)
        object.__setattr__(self, "max_cones", cones)

    @property
    def dim(self) -> int:
        return len(self.rays[0])

    @property
    def nrays(self) -> int:
        return len(self.rays)

    def faces(self) -> set[frozenset]:
        """Ray sets of all cones, including the zero cone."""
        out = set()
        for c in self.max_cones:
            for k in range(len(c) + 1):
                out.update(frozenset(s) for s in combinations(c, k))
        return out


# -- standard fans ----------------------------------------------------------------

def projective_space(n: int) -> Fan:
    rays = [tuple(int(i == j) for j in range(n)) for i in range(n)] + [(-1,) * n]
    cones = [tuple(j for j in range(n + 1) if j != i) for i in range(n + 1)]
    return Fan(rays, cones)


def product_of_projective_spaces(*dims: int) -> Fan:
    """Rays grouped factor by factor; for P^1 x P^1: (1,0), (-1,0), (0,1), (0,-1)."""
    total = sum(dims)
    rays, factor_cones, offset, roff = [], [], 0, 0
    for d in dims:
        local = projective_space(d)
        for r in local.rays:
            v = [0] * total
            v[offset:offset + d] = r
            rays.append(tuple(v))
        factor_cones.append([tuple(i + roff for i in c) for c in local.max_cones])
        offset += d
        roff += d + 1
    cones = [()]
    for options in factor_cones:
        cones = [c + o for c in cones for o in options]
    return Fan(rays, cones)


def hirzebruch(a: int) -> Fan:
    """F_a with rays (1,0), (0,1), (-1,a), (0,-1)."""
    return Fan([(1, 0), (0, 1), (-1, a), (0, -1)], [(0, 1), (1, 2), (2, 3), (0, 3)])


# -- validation -------------------------------------------------------------------

@dataclass
class FanReport:
    smooth: bool
    simplicial: bool
    wall_condition: bool
    ray_coverage: bool
    connected: bool
    complete: str  # "asserted" | "unverified"
    failures: list[str] = field(default_factory=list)
    messages: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def as_dict(self) -> dict:
        return {
            "smooth": self.smooth,
            "simplicial": self.simplicial,
            "wall_condition": self.wall_condition,
            "ray_coverage": self.ray_coverage,
            "connected": self.connected,
            "complete": self.complete,
            "failures": list(self.failures),
            "messages": list(self.messages),
        }


def _cone_matrix(fan: Fan, cone) -> list[list[int]]:
    return [list(fan.rays[i]) for i in cone]


def _probe_vectors(n: int, count: int = 8):
    rng = random.Random(20240917 + n)
    for _ in range(count):
        yield [rng.randint(-997, 997) for _ in range(n)]


def validate_fan(fan: Fan) -> FanReport:
    n = fan.dim
    messages = []
    dets = {c: det(_cone_matrix(fan, c)) for c in fan.max_cones}
    simplicial = all(d != 0 for d in dets.values())
    smooth = all(abs(d) == 1 for d in dets.values())
    for c, d in dets.items():
        if abs(d) != 1:
            messages.append(f"cone {list(c)} has determinant {d}")

    walls: dict[tuple, list] = {}
    for c in fan.max_cones:
        for w in combinations(c, n - 1):
            walls.setdefault(w, []).append(c)
    wall_ok = True
    for w, owners in sorted(walls.items()):
        if len(owners) != 2:
            wall_ok = False
            messages.append(f"wall {list(w)} lies in {len(owners)} maximal cone(s)")

    used = {i for c in fan.max_cones for i in c}
    coverage = len(used) == fan.nrays
    if not coverage:
        messages.append(f"rays {sorted(set(range(fan.nrays)) - used)} lie in no maximal cone")

    # dual graph through shared walls
    seen = set()
    stack = [fan.max_cones[0]] if fan.max_cones else []
    while stack:
        c = stack.pop()
        if c in seen:
            continue
        seen.add(c)
        for w in combinations(c, n - 1):
            stack.extend(o for o in walls[w] if o not in seen)
    connected = len(seen) == len(fan.max_cones)

    complete = "unverified"
    if simplicial and wall_ok and coverage and connected and _looks_complete(fan, walls):
        complete = "asserted"

    failures = []
    if not simplicial:
        failures.append("simplicial")
    if not smooth:
        failures.append("smoothness")
    if not wall_ok:
        failures.append("wall condition")
    if not coverage:
        failures.append("ray coverage")
    return FanReport(smooth, simplicial, wall_ok, coverage, connected, complete, failures, messages)


def _looks_complete(fan: Fan, walls) -> bool:
    n = fan.dim
    counts = {i: 0 for i in range(fan.nrays)}
    for c in fan.max_cones:
        for i in c:
            counts[i] += 1
    if any(v < n for v in counts.values()):
        return False
    # neighbours across a wall must sit on opposite sides of it
    for w, (c1, c2) in walls.items():
        if n == 1:
            normal = [1]
        else:
            sol = solve_linear(_cone_matrix(fan, w), [0] * (n - 1))
            normal = sol.kernel[0]
        (a,) = set(c1) - set(w)
        (b,) = set(c2) - set(w)
        sa = sum(x * y for x, y in zip(normal, fan.rays[a]))
        sb = sum(x * y for x, y in zip(normal, fan.rays[b]))
        if sa * sb >= 0:
            return False
    # a generic point must be covered exactly once
    inverses = {c: inverse(transpose(_cone_matrix(fan, c))) for c in fan.max_cones}
    checked = 0
    for v in _probe_vectors(n):
        coords = [matvec(inverses[c], v) for c in fan.max_cones]
        if any(x == 0 for co in coords for x in co):
            continue
        if sum(all(x > 0 for x in co) for co in coords) != 1:
            return False
        checked += 1
        if checked == 2:
            return True
    return False


# -- class group ------------------------------------------------------------------

def class_group(fan: Fan) -> tuple[int, tuple[tuple[int, ...], ...]]:
    """Rank ``r`` of Pic and the degree of each toric divisor in a fixed basis.

    The lattice of relations among the rays comes from the Smith form of the
    ray matrix; its Hermite form fixes the Pic basis, and the degree of
    ``D_rho`` is column ``rho`` of that Hermite basis.
    """
    R = [list(r) for r in fan.rays]
    U, D, _ = smith_normal_form(R)
    diag = [D[i][i] for i in range(min(len(D), fan.dim)) if D[i][i]]
    if len(diag) != fan.dim:
        raise FanError("rays do not span the lattice")
    if any(d != 1 for d in diag):
        raise ClassGroupTorsionError(f"class group has torsion (invariant factors {diag})")
    G = hermite_normal_form(U[fan.dim:])
    r = fan.nrays - fan.dim
    if r == 0:
        return 0, tuple(() for _ in fan.rays)
    return r, tuple(tuple(col) for col in transpose(G))


def primitive_collections(fan: Fan) -> list[tuple[int, ...]]:
    """Minimal non-faces, sorted by size and then lexicographically."""
    faces = fan.faces()
    out = []
    for k in range(1, fan.dim + 2):
        for s in combinations(range(fan.nrays), k):
            fs = frozenset(s)
            if fs in faces:
                continue
            if all(fs - {i} in faces for i in s):
                out.append(s)
    return out


def face_numbers(fan: Fan) -> list[int]:
    """``f[k]`` = number of k-dimensional cones."""
    f = [0] * (fan.dim + 1)
    for s in fan.faces():
        f[len(s)] += 1
    return f


def betti_numbers(fan: Fan) -> list[int]:
    """Even Betti numbers ``b_0, b_2, ..., b_2n`` of a smooth complete toric variety."""
    n = fan.dim
    f = face_numbers(fan)
    return [sum((-1) ** (i - k) * math.comb(i, k) * f[n - i] for i in range(k, n + 1))
            for k in range(n + 1)]


# -- the variety ------------------------------------------------------------------

@dataclass(frozen=True)
class ToricVariety:
    fan: Fan
    rank: int
    degrees: tuple[tuple[int, ...], ...]
    primitive_collections: tuple[tuple[int, ...], ...]
    reference_cone: int = 0
    report: FanReport = field(default=None, compare=False, hash=False, repr=False)

    @classmethod
    def from_fan(cls, fan: Fan, reference_cone: int = 0) -> "ToricVariety":
        report = validate_fan(fan)
        if not report.ok:
            raise FanError("fan failed validation: " + ", ".join(report.failures))
        r, degrees = class_group(fan)
        if not 0 <= reference_cone < len(fan.max_cones):
            raise FanError(f"reference cone index {reference_cone} out of range")
        return cls(fan, r, degrees, tuple(primitive_collections(fan)), reference_cone, report)

    @property
    def dim(self) -> int:
        return self.fan.dim

    @property
    def nrays(self) -> int:
        return self.fan.nrays

    @property
    def reference(self) -> tuple[int, ...]:
        return self.fan.max_cones[self.reference_cone]

    def class_of_monomial(self, exponent: Sequence[int]) -> tuple[int, ...]:
        return tuple(sum(a * d[j] for a, d in zip(exponent, self.degrees)) for j in range(self.rank))

    def class_of(self, poly: Polynomial) -> tuple[int, ...] | None:
        """Common divisor class of all monomials; None for the zero polynomial."""
        if poly.nvars != self.nrays:
            raise ClassMismatchError(f"polynomial in {poly.nvars} variables, fan has {self.nrays} rays")
        classes = {self.class_of_monomial(e) for e, _ in poly.items()}
        if not classes:
            return None
        if len(classes) > 1:
            raise ClassMismatchError(f"polynomial is not class-homogeneous (classes {sorted(classes)})")
        return classes.pop()

    def lift_class(self, cls_vector: Sequence) -> tuple[Fraction, ...]:
        """A rational divisor ``sum a_rho D_rho`` in the given class."""
        if len(cls_vector) != self.rank:
            raise ArityError(f"class has length {len(cls_vector)}, expected {self.rank}")
        G = transpose(self.degrees)
        sol = solve_linear(G, [Fraction(c) for c in cls_vector])
        return sol.particular

    @cached_property
    def _positive_relation(self) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
        # lambda > 0 with sum lambda_rho u_rho = 0, and t with lambda = t G
        n = self.dim
        lam = [Fraction(0)] * self.nrays
        invs = {c: inverse(transpose(_cone_matrix(self.fan, c))) for c in self.fan.max_cones}
        for rho, u in enumerate(self.fan.rays):
            for c in self.fan.max_cones:
                coords = matvec(invs[c], [-a for a in u])
                if all(x >= 0 for x in coords):
                    lam[rho] += 1
                    for i, x in zip(c, coords):
                        lam[i] += x
                    break
            else:
                raise FanError("fan is not complete: cannot bound sections")
        t = solve_linear(self.degrees, lam).particular
        assert t is not None and n >= 0
        return tuple(lam), t

    def monomials_of_class(self, cls_vector: Sequence[int]) -> list[Exponent]:
        """All Cox monomials of the given divisor class, grlex-descending."""
        cls_vector = tuple(int(c) for c in cls_vector)
        if len(cls_vector) != self.rank:
            raise ArityError(f"class has length {len(cls_vector)}, expected {self.rank}")
        lam, t = self._positive_relation
        budget = sum(a * b for a, b in zip(t, cls_vector))
        out = []
        e = [0] * self.nrays

        def rec(i, left):
            if i == self.nrays:
                if self.class_of_monomial(e) == cls_vector:
                    out.append(tuple(e))
                return
            k = 0
            while k * lam[i] <= left:
                e[i] = k
                rec(i + 1, left - k * lam[i])
                k += 1
            e[i] = 0

        if budget >= 0:
            rec(0, budget)
        out.sort(key=grlex_key, reverse=True)
        return out

    def cox_variable(self, rho: int) -> Polynomial:
        return Polynomial.variable(rho, self.nrays)


@lru_cache(maxsize=256)
def _eliminated_ring(V: ToricVariety, cone: tuple[int, ...]):
    """Images of the Cox variables in Q[y] after solving the linear relations for the rays of ``cone``."""
    free = [rho for rho in range(V.nrays) if rho not in cone]
    r = len(free)
    # m_i dual to the cone's rays: <m_i, u_{cone[j]}> = delta_ij
    duals = inverse(transpose(_cone_matrix(V.fan, cone)))
    images: list[Polynomial] = [None] * V.nrays
    for k, rho in enumerate(free):
        images[rho] = Polynomial.variable(k, r)
    for i, rho in enumerate(cone):
        coeffs = [Fraction(0)] * r
        for k, other in enumerate(free):
            coeffs[k] = -sum(a * b for a, b in zip(duals[i], V.fan.rays[other]))
        images[rho] = Polynomial.linear_form(coeffs)
    gens = []
    for K in V.primitive_collections:
        g = Polynomial.one(r)
        for rho in K:
            g = g * images[rho]
        gens.append(g)
    return images, GradedQuotient(r, gens)


def intersection_number(V: ToricVariety, classes: Sequence[Sequence], *,
                        elimination_cone: int | None = None,
                        normalization_cone: int | None = None) -> Fraction:
    """Classical intersection number of ``n`` divisor classes.

    Computed in ``Q[x_rho] / (SR + linear relations)``: the linear relations
    are used to eliminate the Cox variables of ``elimination_cone``, the
    square-free Stanley-Reisner monomials become products of linear forms,
    and the degree-n normal form is scaled so that the square-free monomial
    of ``normalization_cone`` is 1.  Both cones default to the reference cone.
    """
    if len(classes) != V.dim:
        raise ArityError(f"expected {V.dim} classes, got {len(classes)}")
    cones = V.fan.max_cones
    elim = cones[V.reference_cone if elimination_cone is None else elimination_cone]
    norm = cones[V.reference_cone if normalization_cone is None else normalization_cone]
    images, ring = _eliminated_ring(V, elim)
    r = V.rank
    prod = Polynomial.one(r)
    for c in classes:
        a = V.lift_class(c)
        div = Polynomial.zero(r)
        for rho, coeff in enumerate(a):
            if coeff:
                div = div + images[rho].scale(coeff)
        prod = prod * div
    ref = Polynomial.one(r)
    for rho in norm:
        ref = ref * images[rho]
    return ring.top_ratio(prod, ref, V.dim)
