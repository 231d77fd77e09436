"""Exact binary arithmetic on Python integers: digit sums, 2-adic valuations,
binomial parity (Lucas) and binomial valuation (Kummer)."""

from __future__ import annotations


class ValuationError(ValueError):
    """Raised for nu(0) and for binomials outside their domain."""


def _check_natural(*values: int) -> None:
    for v in values:
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            raise ValueError(f"expected a nonnegative integer, got {v!r}")


def alpha(n: int) -> int:
    """Number of ones in the binary expansion of ``n``."""
    _check_natural(n)
    return bin(n).count("1")


def nu(n: int) -> int:
    """Exponent of the largest power of 2 dividing ``n`` (``n >= 1``)."""
    _check_natural(n)
    if n == 0:
        raise ValuationError("2-adic valuation of 0 is undefined")
    return (n & -n).bit_length() - 1


def binom_mod2(m: int, k: int) -> int:
    """C(m, k) mod 2 via Lucas: 1 iff every bit of k is a bit of m."""
    _check_natural(m, k)
    if k > m:
        return 0
    return 1 if (k & m) == k else 0


def nu_binom(m: int, k: int) -> int:
    """nu(C(m, k)) as the carry count alpha(k) + alpha(m-k) - alpha(m)."""
    _check_natural(m, k)
    if k > m:
        raise ValuationError(f"C({m}, {k}) is zero; its valuation is undefined")
    return alpha(k) + alpha(m - k) - alpha(m)

