"""Oracle-arbitrated verification suites.

Each check compares a computed quantity with an independent oracle (exact
enumeration, Wick expansion, closed forms or seeded Monte Carlo).  Checks of
formulas in their originally printed form are marked ``documented``: they
are expected to fail and carry a note explaining the discrepancy.  A suite
run succeeds when every undocumented check passes and every documented
discrepancy reproduces.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb, prod

import numpy as np

from .combinatorics import enumerate_partitions
from .estimators import PRINTED_POLYKAYS, Sample, polykay, polykay_coefficients
from .photon import joint_cumulant, joint_factorial_cumulant, joint_moment, overall_pmf
from .simulation import (
    covariance_with_se,
    exact_statistic_expectation,
    mean_with_se,
    population_cumulants,
    sample_counts,
    sample_intensities,
    sample_trace_powers,
)
from .spectral import (
    SpectralSample,
    class_convolve,
    inverse_trace_function,
    printed_formula_coefficients,
    printed_spectral_polykay,
    spectral_polykay,
    spectral_prefactor,
    spectr_weights,
    trace_class_function,
    weights_as_formula,
)
from .wishart import WishartModel, cyclic_expansion_trace_moment, joint_intensity_moment, trace_cumulant

SUITES = ("polykays", "spectral", "trace", "joint", "pmf")
NSE = 3.0


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    passed: bool
    detail: str
    documented: bool = False
    note: str = ""

    @property
    def ok(self) -> bool:
        # a documented discrepancy is healthy when it reproduces
        return (not self.passed) if self.documented else self.passed

    def as_dict(self) -> dict:
        out = {"suite": self.suite, "check": self.name, "status": "PASS" if self.passed else "FAIL",
               "detail": self.detail}
        if self.documented:
            out["discrepancy"] = self.note
        return out


def _mc(est, target) -> tuple[bool, str]:
    return est.within(target, NSE), f"estimate {est.value:.6g} +- {est.se:.2g}, expected {float(target):.6g}"


# -- polykays ---------------------------------------------------------------


def suite_polykays(seed: int, samples: int) -> list[Check]:
    out = []
    pop = [0, 1, 2]
    cum = population_cumulants(pop, None, 3)
    for k in range(1, 4):
        for lam in enumerate_partitions(k):
            target = prod(cum[j - 1] for j in lam.parts)
            got = exact_statistic_expectation(pop, None, k + 1, ("polykay", lam))
            out.append(Check("polykays", f"shipped polykay {lam} is unbiased", got == target,
                             f"E = {got}, c_lambda = {target} (uniform {{0,1,2}}, n={k + 1})"))
    for parts, fn in PRINTED_POLYKAYS.items():
        k = sum(parts)
        n = k + 1

        def stat(s, fn=fn):
            sums = {j: s.power_sum(j) for j in (1, 2, 3)}
            return fn(sums, Fraction(s.n))

        target = prod(cum[j - 1] for j in parts)
        got = exact_statistic_expectation(pop, None, n, stat)
        documented = parts == (3,)
        note = ("printed third k-statistic has the wrong sign on its n^2 s_3 term; "
                "unbiased form is (n^2 s_3 - 3 n s_1 s_2 + 2 s_1^3) / (n (n-1) (n-2))") if documented else ""
        out.append(Check("polykays", f"printed formula for {parts} is unbiased", got == target,
                         f"E = {got}, c_lambda = {target}", documented, note))
    return out


# -- spectral polykays ------------------------------------------------------


def suite_spectral(seed: int, samples: int) -> list[Check]:
    out = []
    for k in range(1, 5):
        for d in (2, 3, 5):
            if d < k:
                continue
            conv = class_convolve(trace_class_function(d, k), inverse_trace_function(d, k), k)
            delta = all(v == (1 if rho == (1,) * k else 0) for rho, v in conv.items())
            out.append(Check("spectral", f"trace function inverse, k={k}, d={d}", delta, "f * f^-1 = delta"))
    for d in (3, 4, 7):
        w = spectr_weights((1,), d)
        out.append(Check("spectral", f"order-1 weight at d={d}", w == {(1,): Fraction(1, d)}, f"weights {w}"))
        for lam in ((1, 1), (2,)):
            w = spectr_weights(lam, d)
            den = d * (d * d - 1)
            ok = all((v * den).denominator == 1 for v in w.values())
            out.append(Check("spectral", f"order-2 {lam} denominators divide d(d^2-1) at d={d}", ok, f"weights {w}"))
    for lam in ((1, 1), (2,), (1, 1, 1), (2, 1), (3,)):
        for d in (4, 5):
            eng = weights_as_formula(lam, d)
            printed = printed_formula_coefficients(lam, d)
            documented = lam == (2,)
            note = ("the printed order-2 formula is a verbatim copy of the (1,1) formula; the "
                    "unbiased one is (d T_2 - T_1^2) / (d (d^2 - 1))") if documented else ""
            out.append(Check("spectral", f"printed formula for {lam} matches the engine at d={d}", eng == printed,
                             f"engine {eng}, printed {printed}", documented, note))
    eng3 = weights_as_formula((3,), 5, "printed")
    printed3 = printed_formula_coefficients((3,), 5)
    out.append(Check("spectral", "engine with the printed j! prefactor reproduces the printed (3) formula",
                     eng3 == printed3, f"engine {eng3}, printed {printed3}", True,
                     "the cycle-length prefactor must be prod ((j-1)!)^r_j; prod (j!)^r_j gives 3x the printed "
                     "(3) formula and 2x an unbiased (2) estimator"))
    # Monte-Carlo unbiasedness on 4x4 draws with sigma proportional to the identity
    d, p, s = 4, 2, Fraction(1, 2)
    model = WishartModel([[s if a == b else 0 for b in range(d)] for a in range(d)], p=p)
    traces = sample_trace_powers(model.to_float(), samples, seed, 3)
    sample = SpectralSample(d, tuple(traces[:, j] for j in range(3)))
    for lam in ((1,), (1, 1), (2,), (1, 1, 1), (2, 1), (3,)):
        target = prod(trace_cumulant(model, j) for j in lam) / Fraction(d) ** len(lam)
        est = mean_with_se(spectral_polykay(sample, lam))
        ok, detail = _mc(est, target)
        out.append(Check("spectral", f"spectral polykay {lam} unbiased (Monte Carlo, d=4)", ok, detail))
    est = mean_with_se(printed_spectral_polykay(sample, (2,)))
    ok, detail = _mc(est, trace_cumulant(model, 2) / d)
    out.append(Check("spectral", "printed (2) formula unbiased (Monte Carlo, d=4)", ok, detail, True,
                     "the printed order-2 formula estimates Cum_1(Tr W)^2 / d^2, the (1,1) target"))
    return out


# -- trace statistics --------------------------------------------------------


def _test_model(exact: bool = True) -> WishartModel:
    sigma = [[1, (Fraction(1, 4), Fraction(1, 5)), 0],
             [(Fraction(1, 4), Fraction(-1, 5)), Fraction(3, 2), (0, Fraction(1, 3))],
             [0, (0, Fraction(-1, 3)), Fraction(1, 2)]]
    means = [[Fraction(1, 2), 0, (0, Fraction(1, 4))], [0, Fraction(1, 3), Fraction(1, 5)]]
    return WishartModel(sigma, means, exact=exact)


def suite_trace(seed: int, samples: int) -> list[Check]:
    out = []
    model = _test_model()
    inten = sample_intensities(model.to_float(), samples, seed).intensities
    total = inten.sum(axis=1)
    mean = mean_with_se(total)
    ok, detail = _mc(mean, trace_cumulant(model, 1))
    out.append(Check("trace", "trace cumulant k=1 (mean) against Monte Carlo", ok, detail))
    var = covariance_with_se(total, total)
    ok, detail = _mc(var, trace_cumulant(model, 2))
    out.append(Check("trace", "trace cumulant k=2 (variance) against Monte Carlo", ok, detail))
    minus = model.p * model.trace_sigma_power(1) - model.trace_m_sigma_power(0)
    ok, detail = _mc(mean, minus)
    out.append(Check("trace", "minus-sign non-central term against Monte Carlo", ok, detail, True,
                     "the non-central contribution k! Tr(M sigma^(k-1)) enters with a plus sign; "
                     "the minus sign already fails the mean"))
    iso = WishartModel([[1, 0], [0, 1]])
    rep = cyclic_expansion_trace_moment(iso, 2)
    out.append(Check("trace", "partition/cyclic-polynomial trace moment formula at k=2, sigma=I_2",
                     rep.agrees, f"formula {rep.value}, Bell path {rep.bell_value}", True,
                     "the printed partition formula over-counts (16 vs 6 for Gamma(2,1)); the library "
                     "computes trace moments from trace cumulants and only reports this formula"))
    return out


# -- multivariate -------------------------------------------------------------


def suite_joint(seed: int, samples: int) -> list[Check]:
    out = []
    sigma = [[1, (Fraction(2, 5), Fraction(1, 5))], [(Fraction(2, 5), Fraction(-1, 5)), Fraction(3, 4)]]
    central = WishartModel(sigma, p=2)
    exact_cov = central.p * (Fraction(2, 5) ** 2 + Fraction(1, 5) ** 2)
    fc = joint_factorial_cumulant(central, (1, 1))
    out.append(Check("joint", "factorial cumulant (1,1) equals p|sigma_12|^2 (M=0)", fc == exact_cov,
                     f"{fc} vs {exact_cov}"))
    batch = sample_counts(central.to_float(), samples, seed)
    cov = covariance_with_se(batch.counts[:, 0], batch.counts[:, 1])
    ok, detail = _mc(cov, fc)
    out.append(Check("joint", "Cov(N1, N2) against Monte Carlo", ok, detail))
    withmean = WishartModel(sigma, [[Fraction(1, 2), (0, Fraction(1, 3))], [Fraction(1, 4), 0]])
    b2 = sample_counts(withmean.to_float(), samples, seed + 1)
    n1, n2 = b2.counts[:, 0].astype(float), b2.counts[:, 1].astype(float)
    cov = covariance_with_se(n1, n2)
    ok, detail = _mc(cov, joint_cumulant(withmean, (1, 1)))
    out.append(Check("joint", "joint cumulant (1,1) over all partitions against Monte Carlo", ok, detail))
    ok, detail = _mc(cov, joint_cumulant(withmean, (1, 1), partitions="nonzero"))
    out.append(Check("joint", "joint cumulant (1,1) restricted to all-nonzero columns against Monte Carlo",
                     ok, detail, True,
                     "restricting to partitions whose columns have no zero entry drops the (1,0)(0,1) "
                     "term and returns E[N1 N2] instead of the covariance"))
    m10 = mean_with_se(n1)
    ok, detail = _mc(m10, joint_moment(withmean, (1, 0)))
    out.append(Check("joint", "joint moment (1,0) with marginalized zero entries against Monte Carlo", ok, detail))
    ok, detail = _mc(m10, joint_moment(withmean, (1, 0), zero_policy="vanishing"))
    out.append(Check("joint", "joint moment (1,0) under the literal zero convention against Monte Carlo",
                     ok, detail, True, "a zero entry in k does not make the moment vanish since E[N^0] = 1"))
    agree = all(joint_intensity_moment(withmean, k) == joint_intensity_moment(withmean, k, method="cgf")
                for k in itertools.product(range(4), repeat=2) if 0 < sum(k) <= 5)
    out.append(Check("joint", "Wick and generating-function joint moments agree (|k| <= 5)", agree, "exact"))
    return out


# -- series -----------------------------------------------------------------


def suite_pmf(seed: int, samples: int) -> list[Check]:
    out = []
    s = Fraction(1, 2)
    for p in (1, 3):
        model = WishartModel([[s]], p=p)
        worst = 0.0
        for k in range(11):
            exact = comb(p + k - 1, k) * (1 / (1 + s)) ** p * (s / (1 + s)) ** k
            worst = max(worst, abs(overall_pmf(model, k, 80).value - float(exact)))
        out.append(Check("pmf", f"negative-binomial closure p={p}, k<=10", worst < 1e-8, f"max error {worst:.2e}"))
    big = WishartModel([[2]])
    plain = overall_pmf(big, 0, 40)
    euler = overall_pmf(big, 0, 40, accel="euler")
    out.append(Check("pmf", "Euler transform recovers P(N=0)=1/3 at sigma=2", abs(euler.value - 1 / 3) < 1e-4
                     and not plain.converged, f"euler {euler.value:.10g}, plain converged={plain.converged}"))
    return out


_SUITES = {
    "polykays": suite_polykays,
    "spectral": suite_spectral,
    "trace": suite_trace,
    "joint": suite_joint,
    "pmf": suite_pmf,
}


def run_suites(suite: str = "all", seed: int = 42, samples: int = 200_000) -> list[Check]:
    names = SUITES if suite == "all" else (suite,)
    checks = []
    for name in names:
        if name not in _SUITES:
            raise ValueError(f"unknown suite {name!r}; choose from {SUITES} or 'all'")
        checks.extend(_SUITES[name](seed, samples))
    return checks


def report(checks: list[Check]) -> dict:
    return {
        "checks": [c.as_dict() for c in checks],
        "summary": {
            "total": len(checks),
            "passed": sum(c.passed for c in checks),
            "documented_discrepancies": sum(c.documented for c in checks),
            "unexpected": [c.name for c in checks if not c.ok],
        },
    }
