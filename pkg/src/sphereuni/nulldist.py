"""Null distributions of the three test statistics.

The Rayleigh and Bingham statistics are asymptotically standard normal;
the packing statistic follows a Gumbel-type law with CDF

    G(x) = exp(-(8*pi)**-0.5 * exp(-x/2)).

All three tests reject in the upper tail, so p-values are survival
probabilities.  The normal CDF goes through the complementary error
function (scipy's ``ndtr``/``ndtri``), which stays accurate deep in both
tails; the Gumbel law has closed forms throughout.
"""

from __future__ import annotations

import enum
import math

from scipy.special import ndtr, ndtri

__all__ = ["NullLaw", "cdf", "quantile", "upper_p_value", "GUMBEL_RATE"]

# (8*pi)**-0.5, the rate constant in front of exp(-x/2)
GUMBEL_RATE = 1.0 / math.sqrt(8.0 * math.pi)


class NullLaw(enum.Enum):
    STANDARD_NORMAL = "standard_normal"
    PACKING_GUMBEL = "packing_gumbel"


def _check_finite(x: float, what: str) -> float:
    x = float(x)
    if math.isnan(x):
        raise ValueError(f"{what} must not be NaN")
    return x


def cdf(law: NullLaw, x: float) -> float:
    """P(statistic <= x) under the null law."""
    x = _check_finite(x, "x")
    if law is NullLaw.STANDARD_NORMAL:
        return float(ndtr(x))
    # exp(-x/2) overflows float64 below x ~ -1420; the CDF is 0 there anyway
    t = -0.5 * x
    if t > 700.0:
        return 0.0
    return math.exp(-GUMBEL_RATE * math.exp(t))


def quantile(law: NullLaw, u: float) -> float:
    """Inverse CDF on (0, 1)."""
    u = float(u)
    if not 0.0 < u < 1.0:
        raise ValueError(f"quantile argument must lie in (0, 1), got {u}")
    if law is NullLaw.STANDARD_NORMAL:
        return float(ndtri(u))
    return -2.0 * math.log(-math.log(u) / GUMBEL_RATE)


def upper_p_value(law: NullLaw, statistic: float) -> float:
    """Upper-tail p-value 1 - cdf(law, statistic), clamped to [0, 1]."""
    statistic = _check_finite(statistic, "statistic")
    if law is NullLaw.STANDARD_NORMAL:
        p = float(ndtr(-statistic))
    else:
        t = -0.5 * statistic
        if t > 700.0:
            p = 1.0
        else:
            # 1 - exp(-r*exp(t)) via expm1 keeps precision when G is near 1
            p = -math.expm1(-GUMBEL_RATE * math.exp(t))
    return min(1.0, max(0.0, p))
