"""Exact Bernoulli numbers and the Riemann zeta values the correction sums use.

Bernoulli numbers are kept as exact rationals; conversion to floating point
happens only when a zeta value is produced.  Supported zeta arguments are the
ones that actually appear in the correction sums and the roundoff-floor model:
0, positive even integers, negative even integers, and 3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import OrderTooLargeError, UnsupportedZetaArgumentError

#: Highest k for which B_{2k} / zeta(2k) are served by default (m up to 32).
DEFAULT_MAX_ORDER = 16

#: B_1 in the convention where all other odd Bernoulli numbers vanish.
B1 = Fraction(-1, 2)


@lru_cache(maxsize=None)
def _bernoulli_list(n: int) -> tuple[Fraction, ...]:
    """B_0 .. B_n via the binomial recurrence sum_j C(n+1, j) B_j = 0."""
    vals = [Fraction(1)]
    for k in range(1, n + 1):
        acc = Fraction(0)
        for j in range(k):
            acc += math.comb(k + 1, j) * vals[j]
        vals.append(-acc / (k + 1))
    return tuple(vals)


def bernoulli_even(k: int, max_order: int = DEFAULT_MAX_ORDER) -> Fraction:
    """Exact B_{2k}.

    Raises OrderTooLargeError for k beyond ``max_order`` so that runaway
    rational arithmetic is an explicit failure rather than a stall.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if k > max_order:
        raise OrderTooLargeError(
            f"order too large: B_{2 * k} requested but max_order={max_order}"
        )
    return _bernoulli_list(2 * k)[2 * k]


@lru_cache(maxsize=None)
def _zeta3() -> float:
    # Partial sum plus Euler-Maclaurin tail: sum_{k>M} k^-3 =
    # 1/(2M^2) - 1/(2M^3) + 1/(4M^4) + O(M^-6).
    M = 2000
    partial = math.fsum(k**-3 for k in range(1, M + 1))
    tail = 0.5 / M**2 - 0.5 / M**3 + 0.25 / M**4
    return partial + tail


def zeta_at(j: int, max_order: int = DEFAULT_MAX_ORDER) -> float:
    """zeta(j) for j in {0} + {even} + {3}.

    zeta(0) = -1/2, zeta(-2k) = 0, zeta(2k) from the Bernoulli formula,
    zeta(3) from the summed series with a tail correction.
    """
    if j == 0:
        return -0.5
    if j == 3:
        return _zeta3()
    if j % 2 == 0:
        if j < 0:
            return 0.0
        k = j // 2
        b = bernoulli_even(k, max_order=max_order)
        sign = 1.0 if k % 2 == 1 else -1.0
        rational = Fraction(b, 2 * math.factorial(2 * k))
        return sign * float(rational) * (2.0 * math.pi) ** (2 * k)
    raise UnsupportedZetaArgumentError(f"unsupported zeta argument: {j}")


@dataclass(frozen=True)
class ZetaTable:
    """Precomputed constants for correction sums up to order ``max_order``.

    ``even_values[k]`` is zeta(2k) (so even_values[0] = -1/2) and
    ``bernoulli`` lists [B_0, B_1, B_2, B_4, ..., B_{2 max_order}].
    Immutable, safe for concurrent reads.
    """

    max_order: int
    even_values: tuple[float, ...]
    zeta3: float
    bernoulli: tuple[Fraction, ...]


def zeta_table(max_order: int = DEFAULT_MAX_ORDER) -> ZetaTable:
    """Build the constants table used by the quadrature corrections."""
    if max_order < 0:
        raise ValueError("max_order must be >= 0")
    evens = tuple(zeta_at(2 * k, max_order=max_order) for k in range(max_order + 1))
    bern = (Fraction(1), B1) + tuple(
        bernoulli_even(k, max_order=max_order) for k in range(1, max_order + 1)
    )
    return ZetaTable(
        max_order=max_order, even_values=evens, zeta3=_zeta3(), bernoulli=bern
    )
