import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from obstructa.dyadic import ValuationError, alpha, binom_mod2, nu, nu_binom


def nu_factorial(m, k):
    # Legendre: nu(n!) = sum floor(n / 2^j)
    def leg(n):
        out, p = 0, 2
        while p <= n:
            out += n // p
            p *= 2
        return out

    return leg(m) - leg(k) - leg(m - k)


def nu_direct(x):
    c = 0
    while x % 2 == 0:
        x //= 2
        c += 1
    return c


@pytest.mark.parametrize("n, want", [(0, 0), (3, 2), (7, 3), (3 + 16, 3)])
def test_alpha(n, want):
    assert alpha(n) == want


@pytest.mark.parametrize("n, want", [(1, 0), (8, 3), (12, 2)])
def test_nu(n, want):
    assert nu(n) == want


def test_nu_zero_raises():
    with pytest.raises(ValuationError):
        nu(0)


@pytest.mark.parametrize("m, k, want", [(50, 6, 0), (50, 2, 1), (17, 0, 1), (0, 0, 1)])
def test_binom_mod2(m, k, want):
    assert binom_mod2(m, k) == want


@pytest.mark.parametrize("m, k, want", [(27, 13, 2), (28, 14, 3), (28, 13, 4)])
def test_nu_binom_examples(m, k, want):
    assert nu_binom(m, k) == want
    assert nu_factorial(m, k) == want


def test_nu_binom_quaternionic_family():
    # nu C(8n+3, 4n+1) = nu C(8n+3, 4n+2) = alpha(n) for the two-bit n
    for n in (3, 5, 6, 9, 10, 12):
        assert nu_binom(8 * n + 3, 4 * n + 1) == alpha(n) == 2
        assert nu_binom(8 * n + 3, 4 * n + 2) == 2


def test_nu_binom_stiefel_family():
    for n in (7, 11, 13, 14):
        assert nu_binom(4 * n, 2 * n) == alpha(n)
        assert nu_binom(4 * n, 2 * n - 1) > 2


@pytest.mark.parametrize("bad", [-1, 1.5, True, "3"])
def test_rejects_non_naturals(bad):
    with pytest.raises(ValueError):
        alpha(bad)
    with pytest.raises(ValueError):
        binom_mod2(bad, 0)


def test_binomial_outside_domain():
    assert binom_mod2(3, 5) == 0
    with pytest.raises(ValuationError):
        nu_binom(3, 5)


@given(st.integers(0, 4096), st.integers(0, 4096))
def test_lucas_matches_comb(m, k):
    assert binom_mod2(m, k) == math.comb(m, k) % 2


@given(st.integers(0, 4096).flatmap(lambda m: st.tuples(st.just(m), st.integers(0, m))))
def test_kummer_matches_direct_valuation(mk):
    m, k = mk
    assert nu_binom(m, k) == nu_direct(math.comb(m, k))


@given(st.integers(0, 4096).flatmap(lambda m: st.tuples(st.just(m), st.integers(0, m))))
def test_lucas_kummer_agree(mk):
    m, k = mk
    assert (binom_mod2(m, k) == 1) == (nu_binom(m, k) == 0)


def test_lucas_kummer_exhaustive_small():
    for m in range(257):
        for k in range(m + 1):
            assert (binom_mod2(m, k) == 1) == (nu_binom(m, k) == 0)


@given(st.integers(1, 10**6), st.integers(1, 10**6))
def test_nu_multiplicative(a, b):
    assert nu(a * b) == nu(a) + nu(b)
