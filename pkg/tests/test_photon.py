import itertools
from fractions import Fraction as F
from math import comb, factorial

import numpy as np
import pytest

from conftest import random_exact_model
from photocount.errors import BoundsError, ModelError, OrderError
from photocount.moments import (
    cumulants_from_moments,
    factorial_cumulants_from_moments,
    factorial_moments_from_moments,
)
from photocount.photon import (
    CountModel,
    joint_cumulant,
    joint_factorial_cumulant,
    joint_factorial_moment,
    joint_moment,
    joint_pmf_series,
    overall_cumulant,
    overall_factorial_cumulant,
    overall_factorial_moment,
    overall_moment,
    overall_pmf,
    randomized_stats,
)
from photocount.series import alternating_sum
from photocount.wishart import WishartModel, joint_intensity_moment, single_wave, trace_cumulant, waves

GEOM = WishartModel([[1]])


def test_geometric_examples():
    assert overall_factorial_moment(GEOM, 3) == 6
    assert overall_moment(GEOM, 2) == 3
    assert overall_cumulant(GEOM, 2) == 2
    assert [overall_factorial_cumulant(GEOM, k) for k in range(1, 5)] == [1, 1, 2, 6]


def test_gamma_second_factorial_moment():
    assert overall_factorial_moment(WishartModel([[1, 0], [0, 1]]), 2) == 6


def test_first_order_is_mean(model3):
    mean = model3.p * model3.trace_sigma_power(1) + model3.trace_m_sigma_power(0)
    assert overall_moment(model3, 1) == overall_cumulant(model3, 1) == overall_factorial_moment(model3, 1) == mean


def test_conversion_chains(model3):
    mom = [overall_moment(model3, i) for i in range(1, 6)]
    assert cumulants_from_moments(mom) == [overall_cumulant(model3, k) for k in range(1, 6)]
    assert factorial_moments_from_moments(mom) == [overall_factorial_moment(model3, k) for k in range(1, 6)]
    assert factorial_cumulants_from_moments(mom) == [overall_factorial_cumulant(model3, k) for k in range(1, 6)]


def test_overall_cumulant_additive_over_waves(model3):
    for k in range(1, 5):
        assert overall_cumulant(model3, k) == sum(overall_cumulant(w, k) for w in waves(model3))


@pytest.mark.parametrize("p", [1, 2, 3])
def test_negative_binomial_pmf(p):
    s = F(1, 2)
    m = WishartModel([[s]], p=p)
    for k in range(0, 11):
        exact = comb(p + k - 1, k) * (1 / (1 + s)) ** p * (s / (1 + s)) ** k
        assert overall_pmf(m, k, 80).value == pytest.approx(float(exact), abs=1e-8)


def test_pmf_geometric_k0_truncation_40():
    res = overall_pmf(WishartModel([[0.5]]), 0, 40)
    assert res.value == pytest.approx(2 / 3, abs=1e-8)
    assert res.truncation_order == 40 and not res.accelerated


def test_pmf_euler_beyond_the_convergence_radius():
    m = WishartModel([[2]])
    plain = overall_pmf(m, 0, 40)
    assert not plain.converged
    euler = overall_pmf(m, 0, 40, accel="euler")
    assert euler.accelerated
    assert euler.value == pytest.approx(1 / 3, abs=1e-4)


def test_pmf_bounds():
    with pytest.raises(BoundsError):
        overall_pmf(GEOM, 10, 400)
    with pytest.raises(ValueError):
        overall_pmf(GEOM, -1)


def test_alternating_sum_basics():
    res = alternating_sum([1, F(1, 2), F(1, 4)])
    assert res.value == pytest.approx(0.75)
    assert res.last_term_magnitude == 0.25 and not res.converged
    with pytest.raises(ValueError):
        alternating_sum([1], accel="bogus")
    # Euler transform of log 2 = 1 - 1/2 + 1/3 - ...
    eul = alternating_sum([F(1, n) for n in range(1, 41)], accel="euler")
    assert eul.value == pytest.approx(np.log(2), abs=1e-12)


# -- randomized wave count ---------------------------------------------------


def test_count_model_sequences():
    assert CountModel.deterministic(3).moments(3) == [3, 9, 27]
    assert CountModel.deterministic(3).cumulants(3) == [3, 0, 0]
    assert CountModel.poisson(F(2)).cumulants(3) == [2, 2, 2]
    assert CountModel.poisson(F(2)).moments(2) == [2, 6]
    pmf = CountModel.from_pmf([0, 2], [F(1, 2), F(1, 2)])
    assert pmf.moments(2) == [1, 2]
    with pytest.raises(OrderError):
        CountModel.custom([1, 2]).moments(3)
    with pytest.raises(ValueError):
        CountModel.deterministic(-1)
    with pytest.raises(ModelError):
        CountModel.custom([1]).sample(np.random.default_rng(0), 3)


@pytest.mark.parametrize("kind", ["moment", "factorial_moment", "cumulant", "factorial_cumulant"])
def test_deterministic_count_reduces_to_fixed_p(kind):
    base = WishartModel([[1, (F(1, 4), F(1, 5))], [(F(1, 4), F(-1, 5)), F(1, 2)]], [[F(1, 3), (0, F(1, 2))]])
    p = 3
    fixed = WishartModel(base.sigma, [list(base.means[0])] * p)
    reference = {
        "moment": overall_moment,
        "factorial_moment": overall_factorial_moment,
        "cumulant": overall_cumulant,
        "factorial_cumulant": overall_factorial_cumulant,
    }[kind]
    for k in range(1, 5):
        assert randomized_stats(base, CountModel.deterministic(p), kind, k) == reference(fixed, k)


def test_poisson_count_mean():
    m = WishartModel([[1, 0], [0, F(1, 2)]], [[F(1, 2), 0]])
    mu = F(5, 2)
    expected = mu * (m.trace_sigma_power(1) + m.trace_m_sigma_power(0))
    assert randomized_stats(m, CountModel.poisson(mu), "cumulant", 1) == expected


def test_poisson_of_geometric_second_moment():
    # S = sum of Poisson(2) geometric(1/2) counts: E S^2 = 2*3 + 4*1
    assert randomized_stats(GEOM, CountModel.poisson(2), "moment", 2) == 10


def test_randomized_needs_shared_mean(model3):
    with pytest.raises(ModelError):
        randomized_stats(model3, CountModel.poisson(1), "moment", 1)
    with pytest.raises(ValueError):
        randomized_stats(GEOM, CountModel.poisson(1), "bogus", 1)


# -- multivariate --------------------------------------------------------------


def test_joint_moment_examples(model2):
    e11 = joint_intensity_moment(model2, (1, 1))
    assert joint_moment(model2, (1, 1)) == e11
    assert joint_moment(model2, (2, 1)) == e11 + joint_intensity_moment(model2, (2, 1))
    assert joint_moment(model2, (1, 0), "vanishing") == 0
    assert joint_moment(model2, (1, 0)) == joint_intensity_moment(model2, (1, 0))
    with pytest.raises(ValueError):
        joint_moment(model2, (1, 0), "bogus")


def test_joint_factorial_moment_geometric():
    assert joint_factorial_moment(GEOM, (2,)) == 2


def test_joint_cumulant_examples():
    m = WishartModel([[1, (F(1, 3), F(1, 4))], [(F(1, 3), F(-1, 4)), 2]], p=2)
    assert joint_cumulant(m, (1, 1)) == 2 * (F(1, 9) + F(1, 16))
    d1 = WishartModel([[F(2, 3)]], [[F(1, 2)]])
    for k in range(1, 5):
        assert joint_cumulant(d1, (k,)) == overall_cumulant(d1, k)
        assert joint_factorial_cumulant(d1, (k,)) == trace_cumulant(d1, k)


def test_joint_factorial_cumulant_unit_vector_is_mean(model3):
    for j in range(3):
        e = tuple(1 if i == j else 0 for i in range(3))
        mean = model3.p * model3.sigma_complex[j, j].real + model3.M_complex[j, j].real
        assert float(joint_factorial_cumulant(model3, e)) == pytest.approx(mean)


def test_joint_cumulant_restricted_partitions_differ():
    m = WishartModel([[1, F(1, 2)], [F(1, 2), 1]])
    # the all-nonzero-column restriction keeps only the single-column partition
    assert joint_cumulant(m, (1, 1), partitions="nonzero") == joint_moment(m, (1, 1))
    assert joint_cumulant(m, (1, 1)) == F(1, 4)
    assert joint_cumulant(m, (2, 0), partitions="nonzero") == 0


def test_joint_cumulants_additive_over_waves(model3):
    for k in [(1, 1, 0), (1, 0, 1), (2, 1, 0), (1, 1, 1), (2, 1, 1)]:
        assert joint_cumulant(model3, k) == sum(joint_cumulant(w, k) for w in waves(model3))


def test_equal_mean_two_waves_double_the_single_wave(model2):
    twice = WishartModel(model2.sigma, [list(model2.means[0])] * 2)
    for k in [(1, 1), (2, 1), (1, 2)]:
        assert joint_cumulant(twice, k) == 2 * joint_cumulant(single_wave(model2, 1), k)


def test_joint_moment_and_factorial_moment_are_stirling_related(model2):
    # E[N1^2 N2] = E[(N1)_2 N2] + E[N1 N2]
    assert joint_moment(model2, (2, 1)) == joint_factorial_moment(model2, (2, 1)) + joint_factorial_moment(model2, (1, 1))


def test_joint_pmf_one_dimension_matches_overall():
    m = WishartModel([[F(2, 5)]], [[F(1, 3)]])
    for k in range(4):
        a = joint_pmf_series(m, (k,), 30)
        b = overall_pmf(m, k, 30)
        assert a.value == pytest.approx(b.value, abs=1e-15)


def test_joint_pmf_independent_pixels():
    m = WishartModel([[F(1, 2), 0], [0, F(1, 2)]])
    res = joint_pmf_series(m, (0, 0), 30, accel="euler")
    assert res.value == pytest.approx(4 / 9, abs=1e-6)
    res = joint_pmf_series(m, (1, 2), 30, accel="euler")
    assert res.value == pytest.approx((2 / 3) ** 2 * (1 / 3) ** 3, abs=1e-6)


def test_joint_pmf_shells_sum_to_overall_pmf():
    m = WishartModel([[F(3, 10), F(1, 10)], [F(1, 10), F(1, 5)]])
    total = 0.0
    for n in range(9):
        shell = sum(joint_pmf_series(m, k, 30).value for k in itertools.product(range(n + 1), repeat=2) if sum(k) == n)
        overall = overall_pmf(m, n, 60).value
        assert shell == pytest.approx(overall, abs=1e-9)
        total += shell
    # remaining mass is the overall tail beyond 8 counts
    assert 0 < 1 - total < 1e-4


def test_joint_pmf_bound():
    with pytest.raises(BoundsError):
        joint_pmf_series(GEOM, (10,), 75)
