from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given, settings, strategies as st
from sympy import bell
from sympy.functions.combinatorial.numbers import partition as npartitions
from sympy.combinatorics import Permutation
from sympy.functions.combinatorial.numbers import stirling

from photocount.combinatorics import (
    IntegerPartition,
    MultiIndexPartition,
    cycle_class_size,
    cycle_type,
    enumerate_cycle_classes,
    enumerate_multiindex_partitions,
    enumerate_partitions,
    falling_factorial,
    multiindex_coefficient,
    partition_stats,
    stirling2,
)
from photocount.errors import BoundsError


def test_partitions_of_four_in_reverse_lex_order():
    assert [p.parts for p in enumerate_partitions(4)] == [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]


def test_partition_zero_is_empty():
    assert [p.parts for p in enumerate_partitions(0)] == [()]


@pytest.mark.parametrize("k", range(0, 16))
def test_partition_counts_match_sympy(k):
    assert len(enumerate_partitions(k)) == npartitions(k)


def test_partition_bound():
    with pytest.raises(BoundsError):
        enumerate_partitions(21)


def test_partition_validation():
    with pytest.raises(ValueError):
        IntegerPartition((1, 2))
    with pytest.raises(ValueError):
        IntegerPartition((2, 0))


def test_partition_stats_examples():
    lam = IntegerPartition((2, 1, 1))
    st_ = partition_stats(lam)
    assert st_.length == 3
    assert st_.m_factorial == 2
    # d = 4!/(2! 1!^2 * 1! 2!) = 6 ; d' = 4!/(2 * 1 * 2!) = 6
    assert st_.d_coeff == 6
    assert st_.dprime_coeff == 6
    assert partition_stats(IntegerPartition((2, 2))).d_coeff == 3


@pytest.mark.parametrize("k", range(1, 10))
def test_d_coefficients_sum_to_bell_numbers(k):
    # d_λ counts set partitions of type λ
    assert sum(partition_stats(l).d_coeff for l in enumerate_partitions(k)) == bell(k)


@pytest.mark.parametrize("k", range(1, 9))
def test_cycle_class_sizes_sum_to_factorial(k):
    classes = enumerate_cycle_classes(k)
    assert sum(c.class_size for c in classes) == factorial(k)


@given(st.permutations(list(range(6))))
def test_cycle_type_matches_sympy(perm):
    ours = cycle_type(perm)
    theirs = Permutation(perm).cycle_structure
    assert ours.multiplicities == dict(sorted(theirs.items()))


@pytest.mark.parametrize("n", range(0, 12))
def test_stirling_matches_sympy(n):
    for k in range(0, n + 2):
        assert stirling2(n, k) == stirling(n, k, kind=2)


def test_stirling_large_n_is_flat():
    assert stirling2(400, 399) == 400 * 399 // 2


def test_multiindex_partitions_small_cases():
    cols = {p.columns for p in enumerate_multiindex_partitions((2, 1))}
    assert cols == {
        ((2, 1),),
        ((0, 1), (2, 0)),
        ((1, 0), (1, 1)),
        ((0, 1), (1, 0), (1, 0)),
    }
    assert len(enumerate_multiindex_partitions((2, 2))) == 9


@pytest.mark.parametrize("m", range(1, 7))
def test_all_ones_multiindex_gives_bell(m):
    assert len(enumerate_multiindex_partitions((1,) * m)) == bell(m)


@pytest.mark.parametrize("k", [(1, 1), (2, 1), (2, 2), (3, 1, 1), (1, 2, 2), (0, 3, 1)])
def test_multiindex_coefficients_count_labelled_set_partitions(k):
    total = sum(multiindex_coefficient(l, k) for l in enumerate_multiindex_partitions(k))
    assert total == bell(sum(k))


def test_multiindex_errors():
    with pytest.raises(ValueError):
        enumerate_multiindex_partitions((0, 0))
    with pytest.raises(BoundsError):
        enumerate_multiindex_partitions((6, 5))
    with pytest.raises(ValueError):
        MultiIndexPartition(((0, 0),))


def test_one_dimensional_multiindex_partitions_are_integer_partitions():
    for k in range(1, 8):
        ours = sorted(tuple(sorted((c[0] for c in p.columns), reverse=True))
                      for p in enumerate_multiindex_partitions((k,)))
        assert ours == sorted(p.parts for p in enumerate_partitions(k))


def test_cycle_class_size():
    assert cycle_class_size(IntegerPartition((2, 1))) == 3
    assert cycle_class_size(IntegerPartition((3,))) == 2


@settings(max_examples=50)
@given(st.fractions(min_value=-5, max_value=5, max_denominator=7), st.integers(0, 6))
def test_falling_factorial_product(x, k):
    expected = Fraction(1)
    for j in range(k):
        expected *= x - j
    assert falling_factorial(x, k) == expected
