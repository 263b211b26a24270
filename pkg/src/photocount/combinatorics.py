"""Integer partitions, multi-index partitions, Stirling numbers and cycle classes.

Everything here is exact: integers and :class:`fractions.Fraction` only.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import factorial, prod
from typing import NamedTuple, Sequence

from .errors import BoundsError

MAX_PARTITION = 20
MAX_MULTIINDEX = 10
MAX_CYCLE_CLASS = 8
MAX_STIRLING = 500


@dataclass(frozen=True)
class IntegerPartition:
    """A partition of ``k`` stored as weakly decreasing parts."""

    parts: tuple[int, ...]

    def __post_init__(self):
        parts = tuple(int(x) for x in self.parts)
        if any(x <= 0 for x in parts):
            raise ValueError(f"parts must be positive, got {parts}")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise ValueError(f"parts must be weakly decreasing, got {parts}")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def from_multiplicities(cls, mult: dict[int, int]) -> IntegerPartition:
        parts = []
        for j in sorted(mult, reverse=True):
            parts.extend([j] * mult[j])
        return cls(tuple(parts))

    @property
    def k(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    @cached_property
    def multiplicities(self) -> dict[int, int]:
        """``{j: r_j}`` for every part size present."""
        return dict(sorted(Counter(self.parts).items()))

    def __iter__(self):
        return iter(self.parts)

    def __len__(self):
        return len(self.parts)

    def __str__(self):
        return "(" + ",".join(map(str, self.parts)) + ")"


@dataclass(frozen=True)
class MultiIndexPartition:
    """A multiset of nonzero column vectors, columns in ascending lex order."""

    columns: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        cols = tuple(sorted(tuple(int(x) for x in c) for c in self.columns))
        if not cols:
            raise ValueError("a multi-index partition needs at least one column")
        dims = {len(c) for c in cols}
        if len(dims) != 1:
            raise ValueError("columns must share a dimension")
        if any(all(x == 0 for x in c) or any(x < 0 for x in c) for c in cols):
            raise ValueError("columns must be nonzero and nonnegative")
        object.__setattr__(self, "columns", cols)

    @property
    def dim(self) -> int:
        return len(self.columns[0])

    @property
    def total(self) -> tuple[int, ...]:
        return tuple(sum(col) for col in zip(*self.columns))

    @property
    def length(self) -> int:
        return len(self.columns)

    @cached_property
    def multiplicities(self) -> dict[tuple[int, ...], int]:
        return dict(sorted(Counter(self.columns).items()))


class PartitionStats(NamedTuple):
    length: int
    m_factorial: int
    d_coeff: int
    dprime_coeff: int


@dataclass(frozen=True)
class CycleClass:
    partition: IntegerPartition
    class_size: int


def _check(k: int, bound: int, what: str):
    if k < 0:
        raise ValueError(f"{what} must be nonnegative, got {k}")
    if k > bound:
        raise BoundsError(f"{what}={k} exceeds the configured maximum {bound}")


@lru_cache(maxsize=None)
def _partitions(k: int, largest: int) -> tuple[tuple[int, ...], ...]:
    if k == 0:
        return ((),)
    out = []
    for first in range(min(k, largest), 0, -1):
        for rest in _partitions(k - first, first):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def _enumerate_partitions(k: int) -> tuple[IntegerPartition, ...]:
    return tuple(IntegerPartition(p) for p in _partitions(k, k))


def enumerate_partitions(k: int, bound: int = MAX_PARTITION) -> tuple[IntegerPartition, ...]:
    """All partitions of ``k`` in reverse-lexicographic order.

    ``k = 0`` yields the single empty partition.
    """
    _check(k, bound, "k")
    return _enumerate_partitions(k)


def partition_stats(lam: IntegerPartition) -> PartitionStats:
    """Length, ``m(λ)!``, ``d_λ`` and ``d'_λ`` of a partition."""
    k = lam.k
    mult = lam.multiplicities
    m_fact = prod(factorial(r) for r in mult.values())
    d = factorial(k) // prod(factorial(j) ** r * factorial(r) for j, r in mult.items())
    dprime = factorial(k) // prod(j**r * factorial(r) for j, r in mult.items())
    return PartitionStats(lam.length, m_fact, d, dprime)


@lru_cache(maxsize=None)
def _stirling2(n: int, k: int) -> int:
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    # iterate over n to keep the recursion depth flat
    row = [1] + [0] * k
    for m in range(1, n + 1):
        new = [0] * (k + 1)
        for j in range(1, min(m, k) + 1):
            new[j] = j * row[j] + row[j - 1]
        row = new
    return row[k]


def stirling2(n: int, k: int) -> int:
    """Stirling number of the second kind ``S(n, k)``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    _check(n, MAX_STIRLING, "n")
    if k > n:
        return 0
    return _stirling2(n, k)


def _nonzero_columns(limit: tuple[int, ...]):
    ranges = [range(x + 1) for x in limit]
    return [c for c in itertools.product(*ranges) if any(c)]


@lru_cache(maxsize=None)
def _mi_partitions(rem: tuple[int, ...], cap: tuple[int, ...] | None):
    if not any(rem):
        return ((),)
    out = []
    for col in sorted(_nonzero_columns(rem), reverse=True):
        if cap is not None and col > cap:
            continue
        left = tuple(r - c for r, c in zip(rem, col))
        for rest in _mi_partitions(left, col):
            out.append((col,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def _enumerate_mi(k: tuple[int, ...]) -> tuple[MultiIndexPartition, ...]:
    return tuple(MultiIndexPartition(cols) for cols in _mi_partitions(k, None))


def enumerate_multiindex_partitions(
    k: Sequence[int], bound: int = MAX_MULTIINDEX
) -> tuple[MultiIndexPartition, ...]:
    """All partitions of the multi-index ``k`` (no zero columns)."""
    k = tuple(int(x) for x in k)
    if not k or any(x < 0 for x in k):
        raise ValueError(f"invalid multi-index {k}")
    if not any(k):
        raise ValueError("the all-zero multi-index has no partitions")
    _check(sum(k), bound, "|k|")
    return _enumerate_mi(k)


def multiindex_coefficient(lam: MultiIndexPartition, k: Sequence[int]) -> Fraction:
    """``k! / (m(λ)! λ!)`` where ``λ!`` multiplies factorials of all entries."""
    k = tuple(int(x) for x in k)
    if lam.total != k:
        raise ValueError(f"partition {lam.columns} does not sum to {k}")
    num = prod(factorial(x) for x in k)
    den = prod(factorial(r) for r in lam.multiplicities.values())
    den *= prod(factorial(x) for col in lam.columns for x in col)
    return Fraction(num, den)


def cycle_class_size(lam: IntegerPartition) -> int:
    return partition_stats(lam).dprime_coeff


def enumerate_cycle_classes(k: int) -> tuple[CycleClass, ...]:
    """Conjugacy classes of the symmetric group on ``k`` letters."""
    if k < 1:
        raise ValueError("k must be positive")
    _check(k, MAX_CYCLE_CLASS, "k")
    return tuple(CycleClass(lam, cycle_class_size(lam)) for lam in enumerate_partitions(k))


def cycle_type(perm: Sequence[int]) -> IntegerPartition:
    """Cycle class of a permutation given in one-line notation on ``0..k-1``."""
    seen = [False] * len(perm)
    lengths = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        n, j = 0, start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            n += 1
        lengths.append(n)
    return IntegerPartition(tuple(sorted(lengths, reverse=True)))


def falling_factorial(x, k: int):
    """``x (x-1) ... (x-k+1)``; works for ints, Fractions and floats."""
    out = 1
    for j in range(k):
        out *= x - j
    return out
