"""Conversions between moments, cumulants and their factorial variants.

Sequences are finite prefixes passed as plain sequences ``[x_1, ..., x_K]``
(the implicit ``x_0`` is never stored).  A sequence made only of ints and
Fractions is treated exactly and results come back as Fractions; any float
entry switches the whole sequence to float mode.

Multivariate tables are dicts keyed by multi-index tuples.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb, factorial, prod
from numbers import Rational
from typing import Mapping, Sequence

from .combinatorics import (
    IntegerPartition,
    enumerate_multiindex_partitions,
    enumerate_partitions,
    multiindex_coefficient,
    partition_stats,
    stirling2,
)
from .errors import OrderError


def normalize(seq: Sequence) -> list:
    """Coerce a sequence to a uniform numeric mode (Fraction or float)."""
    if all(isinstance(x, Rational) for x in seq):
        return [Fraction(x) for x in seq]
    return [float(x) for x in seq]


def is_exact(seq: Sequence) -> bool:
    return all(isinstance(x, Rational) for x in seq)


def _need(seq: Sequence, order: int, name: str = "sequence"):
    if len(seq) < order:
        raise OrderError(f"{name} has order {len(seq)} but order {order} is required")


def associated(values: Sequence, lam: IntegerPartition):
    """``x_λ = x_1^{r_1} x_2^{r_2} ...`` for a 1-based value prefix."""
    return prod(values[j - 1] ** r for j, r in lam.multiplicities.items())


def complete_bell(k: int, x: Sequence):
    """Complete exponential Bell polynomial ``Y_k(x_1, ..., x_k)``.

    Evaluated with the recurrence ``Y_n = sum_j C(n-1, j-1) x_j Y_{n-j}``,
    which expands to the sum over partitions of ``d_λ x_λ``.
    """
    if k == 0:
        return 1
    _need(x, k, "x")
    x = normalize(x[:k])
    y = [Fraction(1) if isinstance(x[0], Fraction) else 1.0]
    for n in range(1, k + 1):
        y.append(sum(comb(n - 1, j - 1) * x[j - 1] * y[n - j] for j in range(1, n + 1)))
    return y[k]


def complete_bell_by_partitions(k: int, x: Sequence):
    """Same polynomial as :func:`complete_bell`, summed over ``λ ⊢ k``."""
    if k == 0:
        return 1
    _need(x, k, "x")
    x = normalize(x[:k])
    return sum(partition_stats(lam).d_coeff * associated(x, lam) for lam in enumerate_partitions(k))


def moments_from_cumulants(c: Sequence) -> list:
    c = normalize(c)
    out = [Fraction(1) if is_exact(c) else 1.0]
    for n in range(1, len(c) + 1):
        out.append(sum(comb(n - 1, j - 1) * c[j - 1] * out[n - j] for j in range(1, n + 1)))
    return out[1:]


def cumulants_from_moments(a: Sequence) -> list:
    a = normalize(a)
    full = [1] + a
    c = []
    for n in range(1, len(a) + 1):
        c.append(full[n] - sum(comb(n - 1, j - 1) * c[j - 1] * full[n - j] for j in range(1, n)))
    return c


def _singleton_cumulant(lam: IntegerPartition) -> int:
    return prod(((-1) ** (i - 1) * factorial(i - 1)) ** r for i, r in lam.multiplicities.items())


def factorial_moments_from_moments(a: Sequence) -> list:
    """``f_k = E[(X)_k]`` as ``sum_{λ⊢k} d_λ a_{l(λ)} c̃_λ``.

    ``c̃`` are the cumulants ``(-1)^{i-1} (i-1)!`` of the singleton umbra.
    """
    a = normalize(a)
    out = []
    for k in range(1, len(a) + 1):
        total = 0
        for lam in enumerate_partitions(k):
            st = partition_stats(lam)
            total += st.d_coeff * a[st.length - 1] * _singleton_cumulant(lam)
        out.append(total)
    return out


def moments_from_factorial_moments(f: Sequence) -> list:
    """Inverse of :func:`factorial_moments_from_moments` via ``x^i = sum S(i,k)(x)_k``."""
    f = normalize(f)
    return [sum(stirling2(i, k) * f[k - 1] for k in range(1, i + 1)) for i in range(1, len(f) + 1)]


def factorial_cumulants_from_moments(a: Sequence) -> list:
    return cumulants_from_moments(factorial_moments_from_moments(a))


def generalized_random_sum_moments(g: Sequence, c: Sequence, K: int) -> list:
    """Moments ``sum_{λ⊢k} g_{l(λ)} d_λ c_λ`` for ``k = 1..K``.

    ``g`` are the moments of the (random) number of summands and ``c`` the
    cumulants of one summand.
    """
    _need(g, K, "g")
    _need(c, K, "c")
    exact = is_exact(g) and is_exact(c)
    g = normalize(g) if exact else [float(x) for x in g]
    c = normalize(c) if exact else [float(x) for x in c]
    out = []
    for k in range(1, K + 1):
        total = 0
        for lam in enumerate_partitions(k):
            st = partition_stats(lam)
            total += g[st.length - 1] * st.d_coeff * associated(c, lam)
        out.append(total)
    return out


def cyclic_polynomial(i: int, x: Sequence):
    """``C_i(x_1..x_i) = sum_{λ⊢i} d'_λ x_λ``."""
    if i == 0:
        return 1
    _need(x, i, "x")
    x = normalize(x[:i])
    return sum(partition_stats(lam).dprime_coeff * associated(x, lam) for lam in enumerate_partitions(i))


# -- multivariate ---------------------------------------------------------


def _table_get(table: Mapping, key: tuple):
    try:
        return table[key]
    except KeyError:
        raise OrderError(f"table does not cover multi-index {key}") from None


def _assoc_table(table: Mapping, lam) -> object:
    return prod(_table_get(table, col) ** r for col, r in lam.multiplicities.items())


def mv_generalized_random_sum_moment(g: Sequence, c: Mapping, k: Sequence[int]):
    """``sum_{λ⊨k} k!/(m(λ)! λ!) g_{l(λ)} c_λ`` for a multivariate cumulant table ``c``."""
    k = tuple(k)
    if not any(k):
        return 1
    parts = enumerate_multiindex_partitions(k)
    _need(g, max(p.length for p in parts), "g")
    total = 0
    for lam in parts:
        total += multiindex_coefficient(lam, k) * g[lam.length - 1] * _assoc_table(c, lam)
    return total


def mv_moment_from_cumulants(c: Mapping, k: Sequence[int]):
    """Joint moment from joint cumulants (the ``g ≡ 1`` case)."""
    k = tuple(k)
    n = sum(k)
    return mv_generalized_random_sum_moment([1] * max(n, 1), c, k)


def mv_cumulant_from_moments(a: Mapping, k: Sequence[int]):
    """Joint cumulant from joint moments with weights ``(-1)^{l-1} (l-1)!``."""
    k = tuple(k)
    n = sum(k)
    g = [(-1) ** (l - 1) * factorial(l - 1) for l in range(1, n + 1)]
    return mv_generalized_random_sum_moment(g, a, k)


def multi_indices(d: int, total: int):
    """All multi-indices of dimension ``d`` and the given total degree."""
    if d == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in multi_indices(d - 1, total - first):
            yield (first,) + rest


def multi_indices_upto(d: int, max_total: int, min_total: int = 1):
    for n in range(min_total, max_total + 1):
        yield from multi_indices(d, n)


def mv_cumulants_from_moments(a: Mapping, K: int, d: int) -> dict:
    """Full cumulant table up to total degree ``K``."""
    return {k: mv_cumulant_from_moments(a, k) for k in multi_indices_upto(d, K)}


def mv_moments_from_cumulants(c: Mapping, K: int, d: int) -> dict:
    return {k: mv_moment_from_cumulants(c, k) for k in multi_indices_upto(d, K)}
