import random
from fractions import Fraction
from itertools import combinations_with_replacement

import pytest

from toricscore import (
    Polynomial,
    complete_intersection,
    default_jacobian_J,
    extract_gamma,
    intersection_number,
    product_V,
    restriction_consistency_check,
    score_product,
    undeformed_euler,
)
from toricscore.errors import (
    ArityError,
    ClassMismatchError,
    DivisibilityError,
    HypothesisError,
    NonConstantQuotientError,
)
from toricscore.score import (
    H1_WARNING,
    HypersurfaceData,
    codimension_warning,
    compose_EJ,
    make_hypersurface,
)

from conftest import (
    adapted_jacobian,
    random_class_polynomial,
    random_invertible,
    scalar_block_deformation,
    variety,
)

F = Fraction


def xs(V):
    return [V.cox_variable(i) for i in range(V.nrays)]


def test_default_jacobian_examples():
    V = variety("P2")
    x0, x1, x2 = xs(V)
    h = default_jacobian_J(V, x0 * x1 + x2 ** 2)
    assert h.J == (x1, x0, 2 * x2) and h.divisor_class == (2,)
    Q = variety("P1xP1")
    a1, a2, b1, b2 = xs(Q)
    h = default_jacobian_J(Q, a1 * b1 + a2 * b2)
    assert h.J == (b1, b2, a1, a2)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_gamma_on_p4(d):
    V = variety("P4")
    x = xs(V)
    f = sum((xi ** d for xi in x), Polynomial.zero(5))
    assert extract_gamma(V, undeformed_euler(V), default_jacobian_J(V, f)) == (d,)


def test_gamma_on_p1xp1_is_class():
    V = variety("P1xP1")
    a1, a2, b1, b2 = xs(V)
    E = undeformed_euler(V)
    h = default_jacobian_J(V, a1 * b1 + a2 * b2)
    assert compose_EJ(V, E, h) == [h.f, h.f]
    assert extract_gamma(V, E, h) == (1, 1)


def test_wrong_lift_is_not_divisible():
    V = variety("P2")
    x0, x1, x2 = xs(V)
    f = x0 * x1 + x2 ** 2
    h = make_hypersurface(V, f, [x1, x0, x2])
    with pytest.raises(DivisibilityError) as info:
        extract_gamma(V, undeformed_euler(V), h)
    assert info.value.coordinate == 0
    assert info.value.remainder == 2 * x0 * x1 + x2 ** 2


def test_non_constant_quotient():
    V = variety("P2")
    x0, x1, x2 = xs(V)
    zero = Polynomial.zero(3)
    h = HypersurfaceData(x0, (x0, zero, zero), "bad", (1,))
    with pytest.raises(NonConstantQuotientError):
        extract_gamma(V, undeformed_euler(V), h)


def test_class_checks():
    V = variety("P2")
    x0, x1, x2 = xs(V)
    with pytest.raises(ClassMismatchError):
        make_hypersurface(V, x0 * x1 + x2, [x1, x0, Polynomial.one(3)])
    with pytest.raises(ClassMismatchError):
        make_hypersurface(V, x0 * x1, [x1, x0 * x0, Polynomial.zero(3)])
    with pytest.raises(ClassMismatchError):
        make_hypersurface(V, Polynomial.zero(3), [])
    h = make_hypersurface(V, x0 * x1, {0: x1, 1: x0})
    assert h.J[2].is_zero()


@pytest.mark.parametrize("name", ["P2", "P3", "P1xP1", "F1", "F2", "P1xP2"])
def test_gamma_is_class_for_random_f(name):
    V = variety(name)
    rng = random.Random(name)
    E = undeformed_euler(V)
    for _ in range(5):
        cls = tuple(rng.randint(1, 3) for _ in range(V.rank))
        if not V.monomials_of_class(cls):
            continue
        f = random_class_polynomial(V, cls, rng)
        h = default_jacobian_J(V, f)
        gamma = extract_gamma(V, E, h)
        assert gamma == cls
        for g, p in zip(gamma, compose_EJ(V, E, h)):
            assert p == f.scale(g)


def test_score_examples():
    P4 = variety("P4")
    x = xs(P4)
    E = undeformed_euler(P4)
    quadric = default_jacobian_J(P4, sum((xi ** 2 for xi in x), Polynomial.zero(5)))
    ci = complete_intersection(P4, E, [quadric])
    rep = score_product(P4, E, ci, [(1,)] * 3)
    assert rep.value == 2 and rep.inserted_gammas == [(2,)] and rep.warnings == []
    assert rep.certificate == 2 * Polynomial.variable(0, 1) ** 4
    P5 = variety("P5")
    y = xs(P5)
    E5 = undeformed_euler(P5)
    q1 = default_jacobian_J(P5, y[0] * y[1] + y[2] * y[3] + y[4] * y[5], "Q1")
    q2 = default_jacobian_J(P5, y[0] ** 2 + y[2] ** 2 - y[5] ** 2, "Q2")
    ci5 = complete_intersection(P5, E5, [q1, q2])
    assert score_product(P5, E5, ci5, [(1,)] * 3).value == 4
    assert intersection_number(P5, [(1,)] * 3 + [(2,), (2,)]) == 4


def test_no_hypersurfaces_is_product():
    V = variety("P1xP1")
    E = undeformed_euler(V)
    ci = complete_intersection(V, E, [])
    assert score_product(V, E, ci, [(1, 2), (3, 1)]).value == product_V(V, E, [(1, 2), (3, 1)]) == 7


def test_arity_and_strict_hypotheses():
    V = variety("P2")
    x0, x1, x2 = xs(V)
    E = undeformed_euler(V)
    ci = complete_intersection(V, E, [default_jacobian_J(V, x0 * x1 + x2 ** 2)])
    with pytest.raises(ArityError):
        score_product(V, E, ci, [(1,), (1,)])
    rep = score_product(V, E, ci, [(1,)])
    assert rep.value == 2
    assert codimension_warning(1, 2) in rep.warnings and H1_WARNING in rep.warnings
    with pytest.raises(HypothesisError):
        score_product(V, E, ci, [(1,)], allow_hypothesis_violations=False)


def test_deformed_input_always_warns_h1():
    V = variety("P5")
    rng = random.Random(11)
    A = random_invertible(rng, 6)
    E = scalar_block_deformation(V, {(1,): A})
    y = xs(V)
    f = y[0] * y[1] + y[2] * y[3] + y[4] * y[5]
    h = make_hypersurface(V, f, adapted_jacobian(V, {(1,): A}, f))
    ci = complete_intersection(V, E, [h])
    assert ci.gammas == ((2,),)
    rep = score_product(V, E, ci, [(1,)] * 4)
    assert rep.value == 2 and rep.warnings == [H1_WARNING]


@pytest.mark.parametrize("name", ["P3", "P1xP2"])
def test_undeformed_score_matches_classical_restriction(name):
    V = variety(name)
    rng = random.Random(name)
    E = undeformed_euler(V)
    cls = tuple([1] * V.rank)
    h = default_jacobian_J(V, random_class_polynomial(V, cls, rng))
    ci = complete_intersection(V, E, [h])
    for rays in combinations_with_replacement(range(V.nrays), V.dim - 1):
        sig = [V.degrees[i] for i in rays]
        assert score_product(V, E, ci, sig).value == intersection_number(V, sig + [cls])


def test_hypersurface_order_and_consistency():
    V = variety("P5")
    E = undeformed_euler(V)
    y = xs(V)
    hs = [default_jacobian_J(V, y[0] * y[1] + y[2] ** 2, "A"),
          default_jacobian_J(V, y[3] ** 3 + y[4] * y[5] * y[0], "B")]
    a = score_product(V, E, complete_intersection(V, E, hs), [(1,)] * 3).value
    b = score_product(V, E, complete_intersection(V, E, hs[::-1]), [(1,)] * 3).value
    assert a == b == 6
    rep = restriction_consistency_check(V, E, complete_intersection(V, E, hs), [(1,)] * 3)
    assert rep.consistent and len(rep.traces) == 2
    assert all(t.value == 6 for t in rep.traces)
