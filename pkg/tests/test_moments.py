from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st
from sympy import Rational, bell, symbols
from sympy.functions.combinatorial.numbers import stirling

from photocount.errors import OrderError
from photocount.moments import (
    complete_bell,
    complete_bell_by_partitions,
    cumulants_from_moments,
    cyclic_polynomial,
    factorial_cumulants_from_moments,
    factorial_moments_from_moments,
    generalized_random_sum_moments,
    moments_from_cumulants,
    moments_from_factorial_moments,
    multi_indices,
    multi_indices_upto,
    mv_cumulant_from_moments,
    mv_cumulants_from_moments,
    mv_moment_from_cumulants,
    mv_moments_from_cumulants,
)

small_fracs = st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=5), min_size=1, max_size=7)


def _sympy_complete_bell(k, x):
    xs = symbols(f"x1:{k + 1}")
    poly = sum(bell(k, j, xs[: k - j + 1]) for j in range(1, k + 1))
    val = poly.subs({s: Rational(v.numerator, v.denominator) for s, v in zip(xs, x)})
    return F(int(val.p), int(val.q))


@settings(max_examples=30, deadline=None)
@given(small_fracs)
def test_complete_bell_matches_sympy(x):
    k = len(x)
    assert complete_bell(k, x) == _sympy_complete_bell(k, x)


@given(small_fracs)
def test_bell_recurrence_equals_partition_sum(x):
    assert complete_bell(len(x), x) == complete_bell_by_partitions(len(x), x)


@given(small_fracs)
def test_moment_cumulant_roundtrip(c):
    assert cumulants_from_moments(moments_from_cumulants(c)) == c


def test_gaussian_moments():
    # N(0,1): 1, 3, 15 at even orders
    assert moments_from_cumulants([0, 1, 0, 0, 0, 0]) == [0, 1, 0, 3, 0, 15]


@pytest.mark.parametrize("mu", [F(1, 3), F(2), F(7, 2)])
def test_poisson_moments_are_touchard(mu):
    mom = moments_from_cumulants([mu] * 6)
    for n in range(1, 7):
        assert mom[n - 1] == sum(stirling(n, k, kind=2) * mu**k for k in range(1, n + 1))


@pytest.mark.parametrize("mu", [F(1, 3), F(5, 2)])
def test_poisson_factorial_moments_are_powers(mu):
    fm = factorial_moments_from_moments(moments_from_cumulants([mu] * 6))
    assert fm == [mu**k for k in range(1, 7)]
    # factorial cumulants of a Poisson law vanish beyond order one
    assert factorial_cumulants_from_moments(moments_from_cumulants([mu] * 5)) == [mu, 0, 0, 0, 0]


@given(small_fracs)
def test_factorial_moments_use_signed_stirling(a):
    fm = factorial_moments_from_moments(a)
    for k in range(1, len(a) + 1):
        assert fm[k - 1] == sum(stirling(k, j, kind=1, signed=True) * a[j - 1] for j in range(1, k + 1))
    assert moments_from_factorial_moments(fm) == a


def test_float_mode():
    out = moments_from_cumulants([0.5, 0.25])
    assert isinstance(out[0], float)
    assert out == pytest.approx([0.5, 0.5])


def test_order_errors():
    with pytest.raises(OrderError):
        complete_bell(3, [1, 2])
    with pytest.raises(OrderError):
        generalized_random_sum_moments([1], [1, 2], 2)


@pytest.mark.parametrize("mu", [F(1, 2), F(3)])
def test_compound_poisson_via_random_sum(mu):
    # summand Exp(1): cumulants (j-1)!, raw moments j!
    c = [F(1), F(1), F(2), F(6), F(24)]
    g = moments_from_cumulants([mu] * 5)
    mom = generalized_random_sum_moments(g, c, 5)
    raw = [F(1), F(2), F(6), F(24), F(120)]
    assert cumulants_from_moments(mom) == [mu * r for r in raw]


def test_random_sum_with_one_summand_is_identity():
    c = [F(1, 2), F(3), F(-1), F(2)]
    assert generalized_random_sum_moments([1, 1, 1, 1], c, 4) == moments_from_cumulants(c)


def test_cyclic_polynomial_examples():
    # C_2 = x_1^2 + x_2, C_3 = x_1^3 + 3 x_1 x_2 + 2 x_3
    assert cyclic_polynomial(2, [2, 5]) == 9
    assert cyclic_polynomial(3, [1, 1, 1]) == 6


def test_multi_indices():
    assert list(multi_indices(2, 2)) == [(2, 0), (1, 1), (0, 2)]
    assert len(list(multi_indices_upto(3, 3))) == 3 + 6 + 10


def test_mv_roundtrip_and_one_dimensional_collapse():
    c = {k: F(sum(k) + 1, k[0] + 2) for k in multi_indices_upto(2, 4)}
    a = mv_moments_from_cumulants(c, 4, 2)
    assert mv_cumulants_from_moments(a, 4, 2) == c
    c1 = [F(1, 2), F(2), F(-1, 3), F(5)]
    a1 = mv_moments_from_cumulants({(j,): c1[j - 1] for j in range(1, 5)}, 4, 1)
    assert [a1[(j,)] for j in range(1, 5)] == moments_from_cumulants(c1)


def test_mv_independent_components_have_no_mixed_cumulants():
    # X ~ Poisson(1/2), Y ~ Poisson(3) independent
    mx = moments_from_cumulants([F(1, 2)] * 4)
    my = moments_from_cumulants([F(3)] * 4)
    a = {}
    for k in multi_indices_upto(2, 4):
        a[k] = (mx[k[0] - 1] if k[0] else 1) * (my[k[1] - 1] if k[1] else 1)
    assert mv_cumulant_from_moments(a, (1, 1)) == 0
    assert mv_cumulant_from_moments(a, (2, 1)) == 0
    assert mv_cumulant_from_moments(a, (3, 0)) == F(1, 2)
    assert mv_moment_from_cumulants({(1, 0): 1, (0, 1): 2, (1, 1): 5, (2, 0): 0, (0, 2): 0}, (1, 1)) == 7


def test_mv_missing_entry_is_order_error():
    with pytest.raises(OrderError):
        mv_cumulant_from_moments({(1, 0): 1}, (1, 1))
