"""Polykays (k-statistics and their products) and the factorial-moment U-statistic.

A polykay ``κ_λ`` is the symmetric polynomial in the sample whose expectation
over i.i.d. draws is the cumulant product ``c_λ``.  Coefficients are obtained
for the actual sample size by solving the unbiasedness conditions exactly:
each product of power sums ``s_μ`` has an expectation that is a polynomial
in the population cumulants, and the coefficient vector is the one mapping
that polynomial onto the single monomial ``c_λ``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import prod
from numbers import Rational
from typing import Sequence

from sympy import Matrix, Rational as SymRational
from sympy.utilities.iterables import multiset_partitions

from .combinatorics import IntegerPartition, enumerate_partitions, falling_factorial, partition_stats
from .errors import BoundsError, DegreesOfFreedomError
from .moments import _singleton_cumulant

MAX_POLYKAY_DEGREE = 6
MAX_USTAT_ORDER = 20


class Sample:
    """An i.i.d. sample ``x_1..x_n`` with cached power sums.

    Values made only of ints and Fractions keep exact arithmetic.
    """

    def __init__(self, values: Sequence):
        vals = list(values)
        if not vals:
            raise ValueError("a sample needs at least one value")
        if all(isinstance(x, Rational) for x in vals):
            self.values = tuple(Fraction(x) for x in vals)
            self.exact = True
        else:
            self.values = tuple(float(x) for x in vals)
            self.exact = False
        self._sums: dict[int, object] = {}

    @property
    def n(self) -> int:
        return len(self.values)

    def power_sum(self, j: int):
        """``s_j = sum_i x_i^j``."""
        if j not in self._sums:
            self._sums[j] = sum(x**j for x in self.values)
        return self._sums[j]

    def power_sums(self, K: int) -> list:
        return [self.power_sum(j) for j in range(1, K + 1)]


def as_partition(lam) -> IntegerPartition:
    if isinstance(lam, IntegerPartition):
        return lam
    if isinstance(lam, int):
        return IntegerPartition((lam,))
    return IntegerPartition(tuple(sorted((int(x) for x in lam), reverse=True)))


def _mul(p1: dict, p2: dict) -> dict:
    out: dict = {}
    for a, u in p1.items():
        for b, v in p2.items():
            key = tuple(sorted(a + b, reverse=True))
            out[key] = out.get(key, 0) + u * v
    return out


@lru_cache(maxsize=None)
def _raw_moment_poly(m: int) -> dict:
    # a_m = sum_{ν⊢m} d_ν c_ν
    return {lam.parts: partition_stats(lam).d_coeff for lam in enumerate_partitions(m)}


@lru_cache(maxsize=None)
def _expected_power_product(mu: tuple[int, ...], n: int) -> dict:
    """``E[s_μ]`` over i.i.d. samples of size ``n`` as ``{ρ: coeff}`` in cumulant monomials."""
    out: dict = {}
    for blocks in multiset_partitions(list(range(len(mu)))):
        term = {(): falling_factorial(n, len(blocks))}
        if term[()] == 0:
            continue
        for block in blocks:
            term = _mul(term, _raw_moment_poly(sum(mu[i] for i in block)))
        for key, v in term.items():
            out[key] = out.get(key, 0) + v
    return out


@lru_cache(maxsize=None)
def _coefficient_table(k: int, n: int) -> dict:
    parts = [lam.parts for lam in enumerate_partitions(k)]
    index = {p: i for i, p in enumerate(parts)}
    A = Matrix.zeros(len(parts), len(parts))
    for r, mu in enumerate(parts):
        for rho, v in _expected_power_product(mu, n).items():
            A[r, index[rho]] = v
    At = A.T
    if At.det() == 0:
        raise DegreesOfFreedomError(f"sample size n={n} is too small for degree {k}")
    inv = At.inv()
    table = {}
    for c, lam in enumerate(parts):
        table[lam] = {mu: Fraction(int(SymRational(inv[r, c]).p), int(SymRational(inv[r, c]).q))
                      for r, mu in enumerate(parts) if inv[r, c] != 0}
    return table


def polykay_coefficients(lam, n: int) -> dict[tuple[int, ...], Fraction]:
    """Coefficients ``{μ: w_μ}`` with ``κ_λ = sum_μ w_μ s_μ`` for sample size ``n``."""
    lam = as_partition(lam)
    k = lam.k
    if k < 1:
        raise ValueError("polykay degree must be >= 1")
    if k > MAX_POLYKAY_DEGREE:
        raise BoundsError(f"polykay degree {k} exceeds {MAX_POLYKAY_DEGREE}")
    if n < k:
        raise DegreesOfFreedomError(f"degree {k} needs at least {k} observations, got n={n}")
    return _coefficient_table(k, n)[lam.parts]


def polykay(sample: Sample, lam):
    """Unbiased estimator of the cumulant product ``c_λ``."""
    lam = as_partition(lam)
    coeffs = polykay_coefficients(lam, sample.n)
    total = 0
    for mu, w in coeffs.items():
        term = prod(sample.power_sum(j) for j in mu)
        total += (w if sample.exact else float(w)) * term
    return total


def polykays_upto(sample: Sample, degree: int) -> dict[str, object]:
    """All polykays of degree ``1..degree`` keyed by partition label such as ``"1^2"`` or ``"1,2"``."""
    out = {}
    for k in range(1, degree + 1):
        for lam in enumerate_partitions(k):
            out[partition_label(lam)] = polykay(sample, lam)
    return out


def partition_label(lam: IntegerPartition) -> str:
    items = []
    for j, r in lam.multiplicities.items():
        items.append(str(j) if r == 1 else f"{j}^{r}")
    return ",".join(items)


# Formulas as printed in the source literature, kept for regression checks.
# The degree-3 k-statistic is printed with a wrong sign on its ``n^2 s_3`` term.


def _printed_k1(s, n):
    return s[1] / n


def _printed_k11(s, n):
    return (s[1] ** 2 - s[2]) / (n * (n - 1))


def _printed_k2(s, n):
    return (n * s[2] - s[1] ** 2) / (n * (n - 1))


def _printed_k111(s, n):
    return (s[1] ** 3 - 3 * s[1] * s[2] + 2 * s[3]) / (n * (n - 1) * (n - 2))


def _printed_k12(s, n):
    return (-s[1] ** 3 + (n + 1) * s[1] * s[2] - n * s[3]) / (n * (n - 1) * (n - 2))


def _printed_k3(s, n):
    return (2 * s[1] ** 3 - 3 * s[1] * s[2] * n - n**2 * s[3]) / (n * (n - 1) * (n - 2))


PRINTED_POLYKAYS = {
    (1,): _printed_k1,
    (1, 1): _printed_k11,
    (2,): _printed_k2,
    (1, 1, 1): _printed_k111,
    (2, 1): _printed_k12,
    (3,): _printed_k3,
}


def printed_polykay(sample: Sample, lam):
    lam = as_partition(lam)
    s = {j: sample.power_sum(j) for j in (1, 2, 3)}
    n = Fraction(sample.n) if sample.exact else float(sample.n)
    return PRINTED_POLYKAYS[lam.parts](s, n)


def factorial_moment_ustat(sample: Sample, k: int):
    """``f_k = (1/n) sum_{λ⊢k} d_λ s_{l(λ)} c̃_λ``, the mean of ``(x_i)_k``.

    ``c̃`` are the singleton cumulants ``(-1)^{i-1} (i-1)!``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > MAX_USTAT_ORDER:
        raise BoundsError(f"order {k} exceeds {MAX_USTAT_ORDER}")
    total = 0
    for lam in enumerate_partitions(k):
        st = partition_stats(lam)
        total += st.d_coeff * sample.power_sum(st.length) * _singleton_cumulant(lam)
    return total / (sample.n if not sample.exact else Fraction(sample.n))
