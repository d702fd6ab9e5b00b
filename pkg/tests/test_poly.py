import json

import pytest
from hypothesis import given, settings, strategies as st

from dsred.poly import (
    DiffPoly, LambdaPoly, LocalFunctional, differential_order, functional_eq, normalize_functional,
    partial_derivative, substitute, total_derivative, variational_derivative,
)
from dsred.rational import Q, q_str, to_q

from helpers import diffpolys

u1, u2 = DiffPoly.gen(0), DiffPoly.gen(1)
P3 = diffpolys(3)


def test_total_derivative_examples():
    assert total_derivative(u1 * u2) == u1.deriv() * u2 + u1 * u2.deriv()
    assert total_derivative(DiffPoly.const(7)) == DiffPoly.zero()
    assert (u1 ** 2).deriv(2) == u1.deriv() ** 2 * 2 + u1 * u1.deriv(2) * 2


def test_partial_and_variational_examples():
    p = u1.deriv(2) * u2
    assert partial_derivative(p, 0, 2) == u2
    assert partial_derivative(p, 0, 1) == DiffPoly.zero()
    w = u1 ** 2 * Q(-1, 4)
    assert variational_derivative(w, 0) == u1 * Q(-1, 2)
    # δ/δu of u u'' is 2 u''
    assert variational_derivative(u1 * u1.deriv(2), 0) == u1.deriv(2) * 2


def test_functional_eq_examples():
    assert functional_eq(u1 * u1.deriv(), DiffPoly.zero())
    assert not functional_eq(u1, u1 + 1)
    assert functional_eq(u1.deriv(2) * u1, -(u1.deriv() ** 2))
    assert LocalFunctional(u1.deriv(2) * u1) == LocalFunctional(-(u1.deriv() ** 2))


def test_differential_order():
    assert differential_order(u1.deriv(3) * u2) == 3
    assert differential_order(DiffPoly.const(7)) is None


def test_substitution_is_a_differential_homomorphism():
    images = [u2 ** 2 + u1.deriv(), u1 * u2]
    p, q = u1.deriv() * u2, u2.deriv(2) + u1
    assert substitute(p * q, images) == substitute(p, images) * substitute(q, images)
    assert substitute(p + q, images) == substitute(p, images) + substitute(q, images)
    assert substitute(p.deriv(), images) == substitute(p, images).deriv()


def test_exact_scalars_reject_floats():
    with pytest.raises(TypeError):
        to_q(0.5)
    assert q_str(Q(-6, 4)) == "-3/2"


def test_normalized_representative_is_equivalent():
    p = u1.deriv(2) * u1 + u1.deriv() * u2 + u1 ** 3
    r = normalize_functional(p)
    assert functional_eq(p, r)
    assert u1.deriv(2) * u1 not in [DiffPoly({m: c}) for m, c in r.items()]


def test_json_round_trip():
    p = u1.deriv(3) * u2 * Q(2, 3) - u2 ** 2 + 5
    data = json.loads(json.dumps(p.to_json()))
    assert DiffPoly.from_json(data) == p
    assert data[0]["c"].count("/") == 1
    lp = LambdaPoly({(0,): p, (2,): u1 * Q(-1, 2)}, 1)
    assert LambdaPoly.from_json(json.loads(json.dumps(lp.to_json()))) == lp


def test_latex_uses_derivative_orders():
    assert (u1.deriv(2)).latex(["u_1", "u_2"]) == "u_1^{(2)}"


@settings(max_examples=300, deadline=None)
@given(P3, st.integers(0, 2), st.integers(0, 3))
def test_commutation_relation(p, i, n):
    lhs = partial_derivative(p.deriv(), i, n) - partial_derivative(p, i, n).deriv()
    expected = partial_derivative(p, i, n - 1) if n > 0 else DiffPoly.zero()
    assert lhs == expected


@settings(max_examples=300, deadline=None)
@given(P3, st.integers(0, 2))
def test_variational_derivative_kills_total_derivatives(p, i):
    assert variational_derivative(p.deriv(), i) == DiffPoly.zero()


@settings(max_examples=200, deadline=None)
@given(P3)
def test_representation_equality_is_algebraic(p):
    assert p - p == DiffPoly.zero()
    assert p + p == p * 2
    assert functional_eq(p, normalize_functional(p))


@settings(max_examples=200, deadline=None)
@given(P3, P3, diffpolys(2), diffpolys(2), diffpolys(2))
def test_substitution_properties(p, q, a, b, c):
    images = [a, b, c]
    assert substitute(p * q, images) == substitute(p, images) * substitute(q, images)
    assert substitute(p + q, images) == substitute(p, images) + substitute(q, images)
    assert substitute(p.deriv(), images) == substitute(p, images).deriv()
