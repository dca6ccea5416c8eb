import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from volterra_chain.symm_poly import (
    complete_homogeneous,
    lagrange_closed_form,
    lagrange_power_sum,
    lagrange_terms,
    recursion_check,
)


def brute_force_g(l, u):
    """Sum over every multi-index of total degree l."""
    total = 0
    for combo in itertools.combinations_with_replacement(range(len(u)), l):
        term = 1
        for i in combo:
            term *= u[i]
        total += term
    return total


def test_g0_is_one():
    assert complete_homogeneous(0, [3, 5, 7]) == 1
    assert complete_homogeneous(0, []) == 1


def test_g1_is_sum():
    assert complete_homogeneous(1, [1, 2, 3]) == 6


def test_g2_matches_enumeration():
    assert brute_force_g(2, [1, 2, 3]) == 25
    assert complete_homogeneous(2, [1, 2, 3]) == 25


@pytest.mark.parametrize("l", range(0, 7))
@pytest.mark.parametrize("u", [[2], [1, -3], [Fraction(1, 2), 4, Fraction(-7, 3)], [1, 2, 3, 5]])
def test_g_against_enumeration(l, u):
    assert complete_homogeneous(l, u) == brute_force_g(l, u)


@pytest.mark.parametrize("s", range(1, 9))
def test_two_variable_geometric_sum(s):
    x0, x1 = Fraction(3, 2), Fraction(-5, 7)
    assert complete_homogeneous(s - 1, [x0, x1]) == (x0**s - x1**s) / (x0 - x1)


def test_power_sum_examples():
    assert lagrange_power_sum(0, [1, 2, 3]) == 0
    assert lagrange_power_sum(-1, as_fr([1, 2, 3])) == Fraction(1, 6)
    # 1/2 - 16 + 81/2
    assert lagrange_power_sum(4, as_fr([1, 2, 3])) == 25


def as_fr(x):
    return [Fraction(v) for v in x]


def test_closed_form_examples():
    for x in ([1, 2, 3], [Fraction(1, 3), 5], [2, -1, 7, 4]):
        n = len(x) - 1
        assert lagrange_closed_form(n, as_fr(x)) == 1
    assert lagrange_closed_form(-2, as_fr([2, 4])) == Fraction(-3, 32)
    assert lagrange_power_sum(-2, as_fr([2, 4])) == Fraction(-3, 32)
    assert lagrange_closed_form(1, [1, 2, 3]) == 0


def test_recursion_examples():
    assert recursion_check(0, as_fr([1, 2, 3])) == 0
    assert recursion_check(3, as_fr([1, 2, 5])) == 0
    assert recursion_check(-1, as_fr([1, 2, 3])) == 0
    assert recursion_check(3, [1.0, 2.0, 5.0]) < 1e-12


def test_errors():
    with pytest.raises(ZeroDivisionError):
        lagrange_power_sum(-1, [0, 1, 2])
    with pytest.raises(ZeroDivisionError):
        lagrange_closed_form(-3, [1, 0])
    with pytest.raises(ValueError):
        lagrange_power_sum(2, [1, 1, 2])
    with pytest.raises(ValueError):
        complete_homogeneous(-1, [1, 2])
    with pytest.raises(ValueError):
        recursion_check(1, [1, 2])
    # zero node is fine for s >= 0
    assert lagrange_power_sum(2, [0, 1, 2]) == lagrange_closed_form(2, [0, 1, 2])


exact_nodes = st.lists(
    st.fractions(min_value=-10, max_value=10, max_denominator=12).filter(lambda v: v != 0),
    min_size=2,
    max_size=7,
    unique=True,
)


@settings(max_examples=60, deadline=None)
@given(exact_nodes, st.integers(-6, 12))
def test_exact_identity(x, s):
    assert lagrange_power_sum(s, x) == lagrange_closed_form(s, x)
    if len(x) >= 3:
        assert recursion_check(s, x) == 0


magnitudes = st.floats(0.1, 10.0)
float_nodes = st.lists(
    st.tuples(magnitudes, st.booleans()).map(lambda p: p[0] if p[1] else -p[0]),
    min_size=2,
    max_size=9,
    unique=True,
)


@settings(max_examples=100, deadline=None)
@given(float_nodes, st.integers(-6, 14))
def test_float_identity_with_conditioning_guard(x, s):
    n = len(x) - 1
    if s > n + 6:
        s = n + 6
    terms = lagrange_terms(s, x)
    tol = 1e-9 * (1 + max(abs(t) for t in terms))
    assert abs(sum(terms) - lagrange_closed_form(s, x)) <= tol
    if n >= 2:
        lower = lagrange_terms(s - 1, x) + lagrange_terms(s - 1, x[:-1])
        scale = max(abs(t) for t in terms + [v * max(1, abs(x[-1])) for v in lower])
        assert recursion_check(s, x) <= 1e-9 * (1 + scale)
