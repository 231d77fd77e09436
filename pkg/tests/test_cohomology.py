import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from obstructa.cohomology import (
    BundleData,
    CohomologyClass,
    SteenrodWord,
    TruncationMismatch,
    multiply,
    sq,
    sq_word,
    sw_class,
    total_sw,
)

x = CohomologyClass.monomial


def classes(N):
    return st.frozensets(st.integers(0, N)).map(lambda d: CohomologyClass(N, d))


def test_sq_examples():
    assert sq(6, x(50, 58)).is_zero()
    assert sq(2, x(50, 58)) == x(52, 58)
    assert sq(1, x(30, 58)).is_zero()
    assert sq(0, x(7, 9)) == x(7, 9)


def test_sq_past_truncation_drops():
    assert sq(1, x(9, 9)).is_zero()


def test_sq_words():
    assert sq_word([2, 3], x(51, 58)) == x(56, 58)
    assert sq_word(SteenrodWord((2, 1)), x(50, 58)).is_zero()
    assert sq_word([], x(5, 9)) == x(5, 9)


def test_products():
    assert multiply(x(52, 58), x(4, 58)) == x(56, 58)
    c = CohomologyClass(58, frozenset({3, 7}))
    assert multiply(c, CohomologyClass.one(58)) == c
    assert multiply(x(30, 58), x(30, 58)).is_zero()


def test_truncation_mismatch():
    with pytest.raises(TruncationMismatch):
        x(1, 5) + x(1, 6)
    with pytest.raises(TruncationMismatch):
        multiply(x(1, 5), x(1, 6))


def test_sw_examples():
    assert sw_class(BundleData(108, 58), 4) == x(4, 58)
    assert sw_class(BundleData(108, 58), 8) == x(8, 58)
    assert sw_class(BundleData(112, 58), 52).is_zero()
    assert sw_class(BundleData(112, 58), 4).is_zero()
    assert sw_class(BundleData(112, 58), 8).is_zero()


def test_class_validation():
    with pytest.raises(ValueError):
        CohomologyClass(4, frozenset({5}))
    with pytest.raises(ValueError):
        CohomologyClass(-1)
    assert x(7, 5).is_zero()


@given(st.integers(0, 60), st.integers(0, 60))
def test_sq_matches_binomial(j, k):
    got = sq(k, x(j, 200))
    want = x(j + k, 200) if math.comb(j, k) % 2 else CohomologyClass.zero(200)
    assert got == want


@given(classes(40), classes(40), st.integers(0, 40))
def test_cartan_formula(a, b, k):
    lhs = sq(k, multiply(a, b))
    rhs = CohomologyClass.zero(40)
    for i in range(k + 1):
        rhs = rhs + multiply(sq(i, a), sq(k - i, b))
    assert lhs == rhs


def test_cartan_formula_bulk():
    # 10^4 seeded random cases on monomial sums in H*(P^63)
    import random

    rng = random.Random(1234)
    N = 63
    for _ in range(10_000):
        a = CohomologyClass(N, frozenset(rng.sample(range(N + 1), rng.randint(0, 4))))
        b = CohomologyClass(N, frozenset(rng.sample(range(N + 1), rng.randint(0, 4))))
        k = rng.randint(0, 24)
        rhs = CohomologyClass.zero(N)
        for i in range(k + 1):
            rhs = rhs + multiply(sq(i, a), sq(k - i, b))
        assert sq(k, multiply(a, b)) == rhs


@given(st.integers(1, 40))
def test_sq_top_is_squaring(j):
    assert sq(j, x(j, 200)) == x(2 * j, 200)


@given(classes(30), classes(30))
def test_addition_is_a_group(a, b):
    assert a + b == b + a
    assert (a + b) + b == a
    assert (a + a).is_zero()


@given(st.integers(0, 300), st.integers(0, 80))
def test_total_sw_is_product_of_one_plus_x(p, N):
    acc = CohomologyClass.one(N)
    step = CohomologyClass(N, frozenset({0, 1} if N else {0}))
    for _ in range(p):
        acc = multiply(acc, step)
    assert total_sw(BundleData(p, N)) == acc


def test_steenrod_word_degree():
    assert SteenrodWord((2, 3)).degree == 5
