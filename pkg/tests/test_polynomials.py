"""Exact homogeneous polynomial arithmetic."""

import random

import pytest

from conic_census import InvalidInputError, MultiPoly
from conic_census.polynomials import (
    binary_to_univariate,
    univ_derivative,
    univ_gcd_degree,
    univ_degree,
)


def test_construction_and_degree_guard():
    p = MultiPoly(2, 2, {(2, 0): 1, (1, 1): -3})
    assert p.degree == 2 and p.terms == {(2, 0): 1, (1, 1): -3}
    with pytest.raises(InvalidInputError):
        MultiPoly(2, 2, {(1, 0): 1})  # not homogeneous of declared degree
    z = MultiPoly.zero(3, 5)
    assert z.is_zero() and z.degree == 5


def test_ring_ops_match_pointwise_evaluation():
    rng = random.Random(7)
    for _ in range(40):
        a = MultiPoly(2, 2, {(2, 0): rng.randint(-5, 5), (1, 1): rng.randint(-5, 5), (0, 2): rng.randint(-5, 5)})
        b = MultiPoly(2, 2, {(2, 0): rng.randint(-5, 5), (1, 1): rng.randint(-5, 5), (0, 2): rng.randint(-5, 5)})
        pt = (rng.randint(-9, 9), rng.randint(-9, 9))
        assert (a + b).eval(pt) == a.eval(pt) + b.eval(pt)
        assert (a - b).eval(pt) == a.eval(pt) - b.eval(pt)
        assert (a * b).eval(pt) == a.eval(pt) * b.eval(pt)
        assert (3 * a).eval(pt) == 3 * a.eval(pt)


def test_partial_derivative():
    # d/dy0 (y0^2 y1 + y1^3) = 2 y0 y1
    p = MultiPoly(2, 3, {(2, 1): 1, (0, 3): 1})
    assert p.partial(0) == MultiPoly(2, 2, {(1, 1): 2})
    assert p.partial(1) == MultiPoly(2, 2, {(2, 0): 1, (0, 2): 3})


def test_compose_linear():
    # p(z0, z1) = z0 * z1 under z0 -> w0 + w1, z1 -> w0 - w1 gives w0^2 - w1^2
    p = MultiPoly(2, 2, {(1, 1): 1})
    q = p.compose_linear([[1, 1], [1, -1]])
    assert q == MultiPoly(2, 2, {(2, 0): 1, (0, 2): -1})


def test_min_exponent_and_pretty():
    p = MultiPoly(2, 3, {(1, 2): 2, (2, 1): -1})
    assert p.min_exponent(0) == 1
    assert p.pretty() == "-y0^2*y1 + 2*y0*y1^2"


def test_univariate_helpers():
    # y0 y1 (y0 - y1): dehomogenised u - u^2, derivative 1 - 2u, coprime
    d = binary_to_univariate(MultiPoly(2, 3, {(2, 1): 1, (1, 2): -1}))
    assert d == [0, 1, -1]
    assert univ_degree(d) == 2
    # u(1-u) is squarefree: coprime to its derivative
    assert univ_gcd_degree(d, univ_derivative(d)) == 0
    # (u-1)^2 shares the factor (u-1) with its derivative
    sq = [1, -2, 1]
    assert univ_gcd_degree(sq, univ_derivative(sq)) == 1
    coprime = [2, 0, 1]  # u^2 + 2
    assert univ_gcd_degree(coprime, univ_derivative(coprime)) == 0
