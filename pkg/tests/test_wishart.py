import itertools
from fractions import Fraction as F
from math import factorial

import numpy as np
import pytest
from scipy import stats

from conftest import random_exact_model
from photocount.errors import BoundsError, ModelError
from photocount.moments import cumulants_from_moments
from photocount.wishart import (
    WishartModel,
    cyclic_expansion_trace_moment,
    intensity_cgf_coefficients,
    intensity_moment_table,
    joint_intensity_cumulant,
    joint_intensity_moment,
    single_wave,
    trace_cumulant,
    trace_cumulants,
    trace_moment,
    trace_moments,
    waves,
)


def isserlis_oracle(sigma: np.ndarray, mean: np.ndarray, k) -> complex:
    """E[prod_a |X_a + m_a|^{2 k_a}] for one circular Gaussian wave by explicit pairing."""
    labels = [a for a, ka in enumerate(k) for _ in range(ka)]
    n = len(labels)
    total = 0j
    for S in itertools.product((0, 1), repeat=n):
        for T in itertools.product((0, 1), repeat=n):
            if sum(S) != sum(T):
                continue
            coef = 1 + 0j
            for i in range(n):
                if not S[i]:
                    coef *= mean[labels[i]]
                if not T[i]:
                    coef *= np.conj(mean[labels[i]])
            xs = [labels[i] for i in range(n) if S[i]]
            ys = [labels[i] for i in range(n) if T[i]]
            perm = 0j
            for sigma_perm in itertools.permutations(range(len(ys))):
                term = 1 + 0j
                for i, j in enumerate(sigma_perm):
                    term *= sigma[xs[i], ys[j]]
                perm += term
            total += coef * perm
    return total


def test_model_basics(model2):
    assert model2.d == 2 and model2.p == 1 and model2.exact
    assert model2.trace_sigma_power(1) == 2
    # M = m m^†, m = (1/2, 0)
    assert model2.trace_m_sigma_power(0) == F(1, 4)
    with pytest.raises(ValueError):
        model2.sigma[0, 0] = 3


def test_hermitian_violation_names_the_entry():
    with pytest.raises(ModelError, match=r"sigma\[0\]\[1\]"):
        WishartModel([[1, 0.3], [0.2, 1]])


def test_small_asymmetry_is_symmetrized_with_warning():
    with pytest.warns(UserWarning):
        m = WishartModel([[1.0, 0.3 + 1e-13], [0.3, 1.0]])
    assert m.sigma[0, 1] == m.sigma[1, 0]


def test_not_positive_definite():
    with pytest.raises(ModelError, match="positive definite"):
        WishartModel([[1, 2], [2, 1]])


def test_shape_errors():
    with pytest.raises(ModelError):
        WishartModel([[1, 0]])
    with pytest.raises(ModelError):
        WishartModel([[1]], [[1, 2]])
    with pytest.raises(ModelError):
        WishartModel([[1]], [[1]], p=2)


def test_digest_equality_and_float_mode(model2):
    again = WishartModel([[1, (F(1, 4), F(1, 10))], [(F(1, 4), F(-1, 10)), 1]], [[F(1, 2), 0]])
    assert again == model2 and hash(again) == hash(model2)
    fm = model2.to_float()
    assert not fm.exact
    assert float(trace_cumulant(model2, 3)) == pytest.approx(trace_cumulant(fm, 3))


def test_omega_is_sigma_inverse_times_m(model2):
    assert np.allclose(model2.sigma_complex @ model2.omega, model2.M_complex)


def test_single_wave_and_waves(model3):
    ws = waves(model3)
    assert len(ws) == 2 and all(w.p == 1 for w in ws)
    with pytest.raises(IndexError):
        single_wave(model3, 3)


@pytest.mark.parametrize("s,mean,p", [(F(1, 2), F(0), 1), (F(2), F(1, 2), 1), (F(3, 2), F(1, 2), 3)])
def test_trace_cumulants_match_noncentral_chi_square(s, mean, p):
    # Tr W = (s/2) chi'^2 with 2p degrees of freedom and non-centrality 2|m|^2/s
    model = WishartModel([[s]], [[mean]] + [[0]] * (p - 1))
    nc = float(2 * mean**2 / s)
    dist = stats.ncx2(2 * p, nc) if nc else stats.chi2(2 * p)
    mean_, var, skew, kurt = dist.stats(moments="mvsk")
    scale = float(s) / 2
    expected = [mean_ * scale, var * scale**2, skew * var**1.5 * scale**3, kurt * var**2 * scale**4]
    assert [float(c) for c in trace_cumulants(model, 4)] == pytest.approx(expected, rel=1e-10)


def test_trace_moments_identity_sigma():
    m = WishartModel([[1, 0], [0, 1]])
    # Tr W ~ Gamma(2, 1): moments 2, 6, 24
    assert trace_moments(m, 3) == [2, 6, 24]
    assert trace_moment(m, 0) == 1
    assert cumulants_from_moments(trace_moments(m, 5)) == trace_cumulants(m, 5)


def test_mean_and_variance_closed_forms(rng):
    for _ in range(5):
        m = random_exact_model(rng, 3, 2)
        trS = m.trace_sigma_power(1)
        trS2 = m.trace_sigma_power(2)
        trM = m.trace_m_sigma_power(0)
        trMS = m.trace_m_sigma_power(1)
        assert trace_cumulant(m, 1) == m.p * trS + trM
        assert trace_cumulant(m, 2) == m.p * trS2 + 2 * trMS


def test_cyclic_expansion_report_flags_overcount():
    rep = cyclic_expansion_trace_moment(WishartModel([[1, 0], [0, 1]]), 2)
    assert rep.value == 16 and rep.bell_value == 6 and rep.deviation == 10
    assert not rep.agrees


@pytest.mark.parametrize("k", [(1, 0), (0, 2), (1, 1), (2, 1), (1, 2), (2, 2), (3, 1)])
def test_wick_matches_isserlis_oracle(model2, k):
    ours = float(joint_intensity_moment(model2, k))
    oracle = isserlis_oracle(model2.sigma_complex, model2.means_complex[0], k)
    assert abs(oracle.imag) < 1e-12
    assert ours == pytest.approx(oracle.real, rel=1e-12)


def test_wick_matches_generating_function_on_random_models(rng):
    for _ in range(3):
        m = random_exact_model(rng, 3, 2)
        for k in itertools.product(range(3), repeat=3):
            if 0 < sum(k) <= 4:
                assert joint_intensity_moment(m, k) == joint_intensity_moment(m, k, method="cgf")
                assert joint_intensity_cumulant(m, k) == joint_intensity_cumulant(m, k, method="cgf")


def test_one_dimensional_joint_moment_is_trace_moment():
    m = WishartModel([[F(2, 3)]], [[F(1, 2)], [F(1, 5)]])
    for k in range(1, 6):
        assert joint_intensity_moment(m, (k,)) == trace_moment(m, k)
        assert joint_intensity_cumulant(m, (k,)) == trace_cumulant(m, k)


def test_covariance_is_p_abs_sigma12_squared():
    m = WishartModel([[1, (F(1, 3), F(1, 4))], [(F(1, 3), F(-1, 4)), 2]], p=3)
    assert joint_intensity_cumulant(m, (1, 1)) == 3 * (F(1, 9) + F(1, 16))
    # unit diagonal, p=1: E[I1 I2] = 1 + |sigma12|^2
    u = WishartModel([[1, F(1, 2)], [F(1, 2), 1]])
    assert joint_intensity_moment(u, (1, 1)) == 1 + F(1, 4)


def test_cumulants_are_additive_over_waves(model3):
    for k in [(1, 1, 0), (2, 0, 1), (1, 1, 1), (2, 2, 0)]:
        total = sum(joint_intensity_cumulant(w, k) for w in waves(model3))
        assert joint_intensity_cumulant(model3, k) == total


def test_bounds():
    m = WishartModel([[1]])
    with pytest.raises(BoundsError):
        joint_intensity_moment(m, (7,))
    assert joint_intensity_moment(m, (10,), method="cgf") == factorial(10)
    with pytest.raises(BoundsError):
        intensity_moment_table(m, 81)
    with pytest.raises(ValueError):
        joint_intensity_moment(m, (1, 1))


def test_cgf_coefficients_exponential():
    # d=1, sigma=1, p=1: K(t) = -log(1 - t), coefficient of t^n is 1/n
    coeffs = intensity_cgf_coefficients(WishartModel([[1]]), 6)
    assert [coeffs[(n,)] for n in range(1, 7)] == [F(1, n) for n in range(1, 7)]


def test_float_model_runs_both_routes():
    m = WishartModel([[1.0, 0.2 + 0.1j], [0.2 - 0.1j, 0.7]], [[0.3, 0.1j]])
    a = joint_intensity_moment(m, (2, 1))
    b = joint_intensity_moment(m, (2, 1), method="cgf")
    assert a == pytest.approx(b, rel=1e-12)
