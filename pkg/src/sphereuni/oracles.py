"""Independent ground truth for property tests.

Closed-form moments of pairwise inner products, a brute-force O(n^2 p)
recomputation of the three statistics that shares no code with the fast
path, the null-scale reference for the largest inner product, and a Haar
rotation generator for invariance checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .sampling import SeedSpec, SphericalSample

__all__ = [
    "MomentValue",
    "uniform_inner_moment",
    "alpha_mixed_moment",
    "alpha_fourth_inner_moment",
    "brute_statistics",
    "null_max_reference",
    "random_rotation",
]


@dataclass(frozen=True)
class MomentValue:
    """A moment evaluation; asymptotic values carry a 1+o(1) caveat."""

    value: float
    kind: str  # "exact" | "asymptotic"
    description: str


def uniform_inner_moment(p: int, tau: int) -> MomentValue:
    """E[(X1.X2)^(2 tau)] under uniformity: (2tau-1)!! / prod(p+2i-2).

    Exact for every finite p.
    """
    if p < 1 or tau < 1:
        raise ValueError("p and tau must be positive")
    num = 1.0
    for odd in range(1, 2 * tau, 2):
        num *= odd
    den = 1.0
    for i in range(1, tau + 1):
        den *= p + 2 * i - 2
    return MomentValue(
        value=num / den,
        kind="exact",
        description=f"uniform E[(x.y)^{2 * tau}] at p={p}",
    )


def alpha_mixed_moment(alpha: float, exponents: list[int], p: int) -> MomentValue:
    """Leading-order E[X_{i1}^{2k1} ... X_{ir}^{2kr}] under the heavy-tailed
    spherical law with tail index alpha.

    The binomial-weighted value is (a/2)^(r-1) * prod Gamma(k_j - a/2)
    / (r * Gamma(1 - a/2)^r * Gamma(k)) with k = sum k_j; dividing by
    C(p, r) gives the moment itself.
    """
    if not 0.0 < alpha < 2.0:
        raise ValueError("alpha must lie in (0, 2)")
    if not exponents or any(k < 1 for k in exponents):
        raise ValueError("exponents must be positive integers")
    if p < len(exponents):
        raise ValueError("need p >= number of distinct coordinates")
    r = len(exponents)
    k = sum(exponents)
    half = alpha / 2.0
    num = half ** (r - 1)
    for kj in exponents:
        num *= math.gamma(kj - half)
    den = r * math.gamma(1.0 - half) ** r * math.gamma(k)
    value = num / den / math.comb(p, r)
    return MomentValue(
        value=value,
        kind="asymptotic",
        description=f"alpha-spherical mixed moment, alpha={alpha}, exponents={exponents}, p={p}",
    )


def alpha_fourth_inner_moment(alpha: float, p: int) -> MomentValue:
    """Leading-order E[(X1.X2)^4] = ((2-alpha)/2)^2 / p under the
    symmetric heavy-tailed spherical law."""
    if not 0.0 < alpha < 2.0:
        raise ValueError("alpha must lie in (0, 2)")
    if p < 1:
        raise ValueError("p must be positive")
    return MomentValue(
        value=((2.0 - alpha) / 2.0) ** 2 / p,
        kind="asymptotic",
        description=f"alpha-spherical E[(x.y)^4], alpha={alpha}, p={p}",
    )


def brute_statistics(sample: SphericalSample) -> tuple[float, float, float]:
    """(rayleigh, bingham, packing) by the literal double loop.

    Deliberately avoids the Gram identities and every helper the fast
    path uses; this is the oracle the fast path is checked against.
    """
    n, p = sample.n, sample.p
    if n < 2:
        raise ValueError("need n >= 2")
    rows = sample.rows
    total = 0.0
    total_sq = 0.0
    largest = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            g = float(np.dot(rows[i], rows[j]))
            total += g
            total_sq += g * g
            if abs(g) > largest:
                largest = abs(g)
    rayleigh = math.sqrt(2.0 * p) / n * total
    npairs = n * (n - 1) / 2.0
    bingham = p / n * (total_sq - npairs / p)
    packing = p * largest * largest - 4.0 * math.log(n) + math.log(math.log(n))
    return rayleigh, bingham, packing


def null_max_reference(n: int, p: int) -> float:
    """sqrt(4 log n / p): where max |X_i.X_j| concentrates under uniformity."""
    if n < 3:
        raise ValueError("need n >= 3")
    if p < 1:
        raise ValueError("p must be positive")
    return math.sqrt(4.0 * math.log(n) / p)


def random_rotation(p: int, seed: SeedSpec) -> np.ndarray:
    """Haar-distributed orthogonal p x p matrix.

    QR of a Gaussian matrix with the R diagonal's signs folded into Q,
    which removes the sign ambiguity and makes the law exactly Haar.
    """
    if p < 1:
        raise ValueError("p must be positive")
    rng = seed.generator()
    m = rng.standard_normal((p, p))
    q, r = np.linalg.qr(m)
    signs = np.sign(np.diag(r))
    signs[signs == 0.0] = 1.0
    return q * signs[None, :]
