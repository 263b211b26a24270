"""Photocounting statistics of the mixed Poisson counters driven by a Wishart model.

The overall photocounter ``N = N_1 + ... + N_d`` is mixed Poisson with rate
``Tr W``; its factorial moments are the trace moments and its factorial
cumulants are the trace cumulants.  Multivariate statistics work on the
joint intensity moments of the Wishart diagonal.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, prod
from numbers import Rational
from typing import Sequence

import numpy as np

from .combinatorics import enumerate_multiindex_partitions, multiindex_coefficient, stirling2
from .errors import BoundsError, ModelError, OrderError
from .moments import (
    cumulants_from_moments,
    generalized_random_sum_moments,
    moments_from_cumulants,
    multi_indices,
    normalize,
)
from .series import SERIES_TOL, SeriesResult, alternating_sum
from .wishart import (
    CGF_BOUND,
    WishartModel,
    intensity_moment_table,
    joint_intensity_cumulant,
    joint_intensity_moment,
    single_wave,
    trace_cumulant,
    trace_moment,
    trace_moments,
    waves,
)

MOMENT_BOUND = 400
DEFAULT_TRUNCATION = 60


def _check_order(k: int, what="order"):
    if k < 1:
        raise ValueError(f"{what} must be >= 1, got {k}")
    if k > MOMENT_BOUND:
        raise BoundsError(f"{what} {k} exceeds the moment bound {MOMENT_BOUND}")


# -- overall photocounter ---------------------------------------------------


def overall_factorial_moment(model: WishartModel, i: int):
    """``E[(N)_i] = E[(Tr W)^i]``."""
    _check_order(i)
    return trace_moment(model, i)


def overall_moment(model: WishartModel, i: int):
    """``E[N^i] = sum_k S(i, k) E[(Tr W)^k]``."""
    _check_order(i)
    mom = trace_moments(model, i)
    return sum(stirling2(i, k) * mom[k - 1] for k in range(1, i + 1))


def overall_cumulant(model: WishartModel, k: int):
    """``Cum_k(N) = sum_i S(k, i) Cum_i(Tr W)``."""
    _check_order(k)
    return sum(stirling2(k, i) * trace_cumulant(model, i) for i in range(1, k + 1))


def overall_factorial_cumulant(model: WishartModel, k: int):
    """``FCum_k(N) = Cum_k(Tr W)``."""
    _check_order(k)
    return trace_cumulant(model, k)


def overall_pmf(model: WishartModel, k: int, truncation: int = DEFAULT_TRUNCATION,
                accel: str = "none", tol: float = SERIES_TOL) -> SeriesResult:
    """``P(N = k)`` from the alternating series over trace moments.

    Term ``i`` is ``E[(Tr W)^{k+i}] / (k! i!)``.  The plain series converges
    when the mean total intensity stays below one per pixel; outside that
    regime use ``accel="euler"`` and inspect ``converged``.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if k + truncation > MOMENT_BOUND:
        raise BoundsError(f"k + truncation = {k + truncation} exceeds the moment bound {MOMENT_BOUND}")
    mom = [trace_moment(model, 0)] + trace_moments(model, k + truncation)
    kf = factorial(k)
    b = [Fraction(mom[k + i]) / (kf * factorial(i)) for i in range(truncation + 1)]
    return alternating_sum(b, accel, tol)


# -- randomized wave count --------------------------------------------------


@dataclass(frozen=True)
class CountModel:
    """Distribution of the random wave count ``P``.

    Use :meth:`deterministic`, :meth:`poisson`, :meth:`custom` (a finite
    moment prefix) or :meth:`from_pmf` (finite support).
    """

    kind: str
    parameter: object = None
    moment_prefix: tuple = ()
    support: tuple = ()
    probs: tuple = field(default=())

    @classmethod
    def deterministic(cls, p: int) -> CountModel:
        if int(p) != p or p < 0:
            raise ValueError(f"deterministic wave count must be a nonnegative integer, got {p}")
        return cls("deterministic", int(p))

    @classmethod
    def poisson(cls, mu) -> CountModel:
        if mu < 0:
            raise ValueError("Poisson mean must be nonnegative")
        return cls("poisson", Fraction(mu) if isinstance(mu, Rational) else float(mu))

    @classmethod
    def custom(cls, moments: Sequence) -> CountModel:
        if not moments:
            raise ValueError("custom count model needs at least one moment")
        return cls("custom", None, tuple(normalize(moments)))

    @classmethod
    def from_pmf(cls, support: Sequence[int], probs: Sequence) -> CountModel:
        probs = tuple(normalize(probs))
        if len(support) != len(probs) or any(int(s) < 0 for s in support):
            raise ValueError("support must be nonnegative integers matching probs")
        if abs(float(sum(probs)) - 1.0) > 1e-12:
            raise ValueError("probabilities must sum to one")
        return cls("pmf", None, (), tuple(int(s) for s in support), probs)

    @property
    def exact(self) -> bool:
        if self.kind == "poisson":
            return isinstance(self.parameter, Fraction)
        if self.kind == "custom":
            return all(isinstance(x, Fraction) for x in self.moment_prefix)
        if self.kind == "pmf":
            return all(isinstance(x, Fraction) for x in self.probs)
        return True

    def moments(self, K: int) -> list:
        if self.kind == "deterministic":
            return [Fraction(self.parameter) ** k for k in range(1, K + 1)]
        if self.kind == "poisson":
            return moments_from_cumulants([self.parameter] * K)
        if self.kind == "custom":
            if len(self.moment_prefix) < K:
                raise OrderError(f"custom count model provides order {len(self.moment_prefix)}, need {K}")
            return list(self.moment_prefix[:K])
        return [sum(q * s**k for s, q in zip(self.support, self.probs)) for k in range(1, K + 1)]

    def cumulants(self, K: int) -> list:
        if self.kind == "deterministic":
            return [Fraction(self.parameter)] + [Fraction(0)] * (K - 1)
        if self.kind == "poisson":
            return [self.parameter] * K
        return cumulants_from_moments(self.moments(K))

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.kind == "deterministic":
            return np.full(n, self.parameter, dtype=np.int64)
        if self.kind == "poisson":
            return rng.poisson(float(self.parameter), size=n)
        if self.kind == "pmf":
            return rng.choice(np.array(self.support), size=n, p=np.array([float(q) for q in self.probs]))
        raise ModelError("a count model given only by moments cannot be sampled")

    def as_dict(self) -> dict:
        if self.kind in ("deterministic", "poisson"):
            return {"kind": self.kind, "parameter": _num(self.parameter)}
        if self.kind == "custom":
            return {"kind": "custom", "moments": [_num(x) for x in self.moment_prefix]}
        return {"kind": "pmf", "support": list(self.support), "probs": [_num(x) for x in self.probs]}


def _num(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    return x


RANDOMIZED_KINDS = ("moment", "factorial_moment", "cumulant", "factorial_cumulant")


def randomized_stats(model: WishartModel, count: CountModel, kind: str, k: int):
    """Statistics of the randomized overall photocounter with ``P`` random waves.

    Every wave shares the mean vector of ``model``.  The four kinds are
    partition sums ``sum_{λ⊢k} d_λ g_{l(λ)} x_λ`` where ``g`` holds the
    moments of ``P`` (moment kinds) or its cumulants (cumulant kinds) and
    ``x`` holds the single-wave cumulants of the overall counter (plain
    kinds) or of the trace (factorial kinds).
    """
    if kind not in RANDOMIZED_KINDS:
        raise ValueError(f"kind must be one of {RANDOMIZED_KINDS}")
    _check_order(k)
    if not model.shared_mean:
        raise ModelError("randomized wave counts need a single mean vector shared by all waves")
    one = single_wave(model, 1)
    if kind in ("moment", "cumulant"):
        x = [overall_cumulant(one, j) for j in range(1, k + 1)]
    else:
        x = [trace_cumulant(one, j) for j in range(1, k + 1)]
    g = count.moments(k) if kind in ("moment", "factorial_moment") else count.cumulants(k)
    return generalized_random_sum_moments(g, x, k)[k - 1]


# -- multivariate photocounter ----------------------------------------------


ZERO_POLICIES = ("marginalize", "vanishing")


def _stirling_row(n: int, zero_policy: str):
    if n == 0:
        # S(0, 0) = 1 keeps I^0 = 1; the literal convention has an empty sum
        return {0: 1} if zero_policy == "marginalize" else {}
    return {i: stirling2(n, i) for i in range(1, n + 1)}


def joint_moment(model: WishartModel, k: Sequence[int], zero_policy: str = "marginalize", *,
                 method: str = "wick"):
    """``E[N_1^{k_1} ... N_d^{k_d}] = E[prod_j sum_i S(k_j, i) I_j^i]``.

    With ``zero_policy="vanishing"`` any ``k_j = 0`` makes the product
    vanish; ``"marginalize"`` treats such pixels as absent.
    """
    if zero_policy not in ZERO_POLICIES:
        raise ValueError(f"zero_policy must be one of {ZERO_POLICIES}")
    k = tuple(int(x) for x in k)
    rows = [_stirling_row(x, zero_policy) for x in k]
    total = 0
    for combo in itertools.product(*(r.items() for r in rows)):
        idx = tuple(i for i, _ in combo)
        coeff = prod(s for _, s in combo)
        total += coeff * joint_intensity_moment(model, idx, method=method)
    if not model.exact:
        total = float(total)
    return total


def joint_factorial_moment(model: WishartModel, k: Sequence[int], *, method: str = "wick"):
    """``E[prod_j (N_j)_{k_j}] = E[I^k]``."""
    return joint_intensity_moment(model, k, method=method)


PARTITION_SETS = ("all", "nonzero")


def joint_cumulant(model: WishartModel, k: Sequence[int], partitions: str = "all"):
    """Joint cumulant of the counts, summed wave by wave.

    For each wave the cumulant is the multi-index partition sum with weights
    ``(-1)^{l-1} (l-1)!`` over that wave's joint count moments.
    ``partitions="nonzero"`` keeps only partitions whose columns have every
    entry nonzero, as in the printed restriction; it is exposed for
    comparison and disagrees with the count covariance (see ``verify``).
    """
    if partitions not in PARTITION_SETS:
        raise ValueError(f"partitions must be one of {PARTITION_SETS}")
    k = tuple(int(x) for x in k)
    if len(k) != model.d or not any(k):
        raise ValueError(f"invalid multi-index {k} for d={model.d}")
    parts = enumerate_multiindex_partitions(k)
    if partitions == "nonzero":
        parts = [lam for lam in parts if all(all(x != 0 for x in col) for col in lam.columns)]
    total = 0
    for wave in waves(model):
        cache: dict = {}

        def mom(col):
            if col not in cache:
                cache[col] = joint_moment(wave, col)
            return cache[col]

        for lam in parts:
            l = lam.length
            weight = (-1) ** (l - 1) * factorial(l - 1)
            term = prod(mom(col) ** r for col, r in lam.multiplicities.items())
            total += multiindex_coefficient(lam, k) * weight * term
    if not model.exact:
        total = float(total)
    return total


def joint_factorial_cumulant(model: WishartModel, k: Sequence[int], *, method: str = "wick"):
    """``FCum_k(N) = Cum_k(I)``."""
    return joint_intensity_cumulant(model, k, method=method)


def joint_pmf_series(model: WishartModel, k: Sequence[int], truncation: int = 30,
                     accel: str = "none", tol: float = SERIES_TOL) -> SeriesResult:
    """``P(N = k) = (1/k!) sum_j (-1)^{|j|} E[I^{j+k}] / j!``, truncated at ``|j| <= truncation``.

    Terms are grouped by shell ``|j| = i`` so the acceleration options of
    :func:`overall_pmf` apply unchanged.
    """
    k = tuple(int(x) for x in k)
    if len(k) != model.d or any(x < 0 for x in k):
        raise ValueError(f"invalid multi-index {k} for d={model.d}")
    top = sum(k) + truncation
    if top > CGF_BOUND:
        raise BoundsError(f"|k| + truncation = {top} exceeds the joint-moment bound {CGF_BOUND}")
    table = intensity_moment_table(model, top) if top > 0 else {}
    kf = prod(factorial(x) for x in k)
    b = []
    for i in range(truncation + 1):
        shell = Fraction(0)
        for j in multi_indices(model.d, i):
            idx = tuple(a + c for a, c in zip(j, k))
            m = Fraction(1) if not any(idx) else Fraction(table[idx])
            shell += m / prod(factorial(x) for x in j)
        b.append(shell / kf)
    return alternating_sum(b, accel, tol)
