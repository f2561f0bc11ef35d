"""Samplers on the unit hypersphere S^{p-1}.

Covers the uniform null, projections of i.i.d. heavy-tailed coordinates
(Cauchy, Student-t, symmetrized Pareto, centered chi-square), and the
Fisher-von Mises-Langevin family.  Every sampler is a pure function of
its arguments and a SeedSpec, so identical calls give bit-identical
samples no matter where or when they run.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "UNIT_NORM_TOL",
    "SeedSpec",
    "SphericalSample",
    "HeavyTailMarginal",
    "AlternativeModel",
    "sample_uniform_sphere",
    "draw_marginal",
    "sample_alpha_spherical",
    "sample_fvml",
    "sample_from_model",
]

UNIT_NORM_TOL = 1e-12

# attempts before a run of zero-norm raw vectors is treated as a broken marginal
_MAX_RENORM_ATTEMPTS = 100


@dataclass(frozen=True)
class SeedSpec:
    """A reproducible stream address: (master seed, replication index).

    The derived generator is a pure function of both fields; distinct
    replication indices give statistically independent streams.
    """

    master_seed: int
    replication_index: int = 0

    def __post_init__(self) -> None:
        if not 0 <= int(self.master_seed) < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        if int(self.replication_index) < 0:
            raise ValueError("replication_index must be non-negative")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence((int(self.master_seed), int(self.replication_index)))
        return np.random.default_rng(ss)


@dataclass(frozen=True)
class SphericalSample:
    """n points on S^{p-1}, one per row."""

    n: int
    p: int
    rows: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.n < 1 or self.p < 1:
            raise ValueError("n and p must be positive")
        if self.rows.shape != (self.n, self.p):
            raise ValueError(f"rows must have shape ({self.n}, {self.p})")
        norms = np.linalg.norm(self.rows, axis=1)
        worst = float(np.abs(norms - 1.0).max())
        if worst > UNIT_NORM_TOL:
            raise ValueError(f"row norms deviate from 1 by up to {worst:.3e}")

    @classmethod
    def from_rows(cls, rows: np.ndarray) -> "SphericalSample":
        rows = np.asarray(rows, dtype=np.float64)
        if rows.ndim != 2:
            raise ValueError("rows must be a 2-d array")
        return cls(n=rows.shape[0], p=rows.shape[1], rows=rows)


@dataclass(frozen=True)
class HeavyTailMarginal:
    """Coordinate law whose projection to the sphere we sample.

    kind is one of "cauchy", "student_t", "pareto", "centered_chisq1";
    param carries the t degrees of freedom or the Pareto tail index.
    """

    kind: str
    param: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("cauchy", "student_t", "pareto", "centered_chisq1"):
            raise ValueError(f"unknown marginal kind {self.kind!r}")
        if self.kind == "student_t":
            if self.param is None or self.param <= 0:
                raise ValueError("student_t needs degrees of freedom > 0")
        elif self.kind == "pareto":
            if self.param is None or not 0.0 < self.param < 2.0:
                raise ValueError("pareto tail index must lie in (0, 2)")
        elif self.param is not None:
            raise ValueError(f"{self.kind} takes no parameter")

    @classmethod
    def cauchy(cls) -> "HeavyTailMarginal":
        return cls("cauchy")

    @classmethod
    def student_t(cls, nu: float) -> "HeavyTailMarginal":
        return cls("student_t", float(nu))

    @classmethod
    def pareto(cls, alpha: float) -> "HeavyTailMarginal":
        return cls("pareto", float(alpha))

    @classmethod
    def centered_chisq1(cls) -> "HeavyTailMarginal":
        return cls("centered_chisq1")

    @property
    def is_symmetric(self) -> bool:
        return self.kind != "centered_chisq1"

    @property
    def tail_index(self) -> float | None:
        """Regular-variation index when it lies in (0, 2), else None."""
        if self.kind == "cauchy":
            return 1.0
        if self.kind == "student_t" and self.param < 2.0:
            return self.param
        if self.kind == "pareto":
            return self.param
        return None


@dataclass(frozen=True)
class AlternativeModel:
    """Data-generating law: uniform, alpha-spherical, or FvML.

    For FvML, direction=None means "draw a fresh random unit direction
    from the replication's own stream before sampling"; the tests are
    rotation invariant so this choice does not affect rejection rates.
    """

    kind: str
    marginal: HeavyTailMarginal | None = None
    kappa: float = 0.0
    direction: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.kind not in ("uniform", "alpha_spherical", "fvml"):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.kind == "alpha_spherical" and self.marginal is None:
            raise ValueError("alpha_spherical model needs a marginal")
        if self.kind == "fvml":
            if self.kappa < 0:
                raise ValueError("kappa must be >= 0")
            if self.direction is not None:
                d = np.asarray(self.direction, dtype=np.float64)
                if d.ndim != 1:
                    raise ValueError("direction must be a 1-d unit vector")
                if abs(float(np.linalg.norm(d)) - 1.0) > UNIT_NORM_TOL:
                    raise ValueError("direction must have unit norm within 1e-12")

    @classmethod
    def uniform(cls) -> "AlternativeModel":
        return cls("uniform")

    @classmethod
    def alpha_spherical(cls, marginal: HeavyTailMarginal) -> "AlternativeModel":
        return cls("alpha_spherical", marginal=marginal)

    @classmethod
    def fvml(cls, kappa: float, direction: np.ndarray | None = None) -> "AlternativeModel":
        return cls("fvml", kappa=float(kappa), direction=direction)

    def describe(self) -> str:
        if self.kind == "uniform":
            return "uniform"
        if self.kind == "alpha_spherical":
            m = self.marginal
            return f"alpha_spherical({m.kind}{'' if m.param is None else f'={m.param:g}'})"
        return f"fvml(kappa={self.kappa:g})"


def _normalize_rows(raw: np.ndarray, redraw, what: str) -> np.ndarray:
    """Project rows to unit norm, redrawing any zero-norm row.

    Zero norms have probability zero for continuous marginals; a hard cap
    turns a broken generator into a diagnosable error rather than a hang.
    """
    norms = np.linalg.norm(raw, axis=1)
    bad = np.flatnonzero(norms == 0.0)
    attempts = 0
    while bad.size:
        attempts += 1
        if attempts > _MAX_RENORM_ATTEMPTS:
            raise RuntimeError(
                f"{what}: {_MAX_RENORM_ATTEMPTS} consecutive zero-norm draws"
            )
        raw[bad] = redraw(bad.size)
        norms[bad] = np.linalg.norm(raw[bad], axis=1)
        bad = bad[norms[bad] == 0.0]
    return raw / norms[:, None]


def sample_uniform_sphere(n: int, p: int, seed: SeedSpec) -> SphericalSample:
    """i.i.d. Unif(S^{p-1}) rows: normalized standard Gaussian vectors."""
    if n < 1 or p < 1:
        raise ValueError("n and p must be positive")
    rng = seed.generator()
    raw = rng.standard_normal((n, p))
    rows = _normalize_rows(raw, lambda k: rng.standard_normal((k, p)), "uniform sampler")
    return SphericalSample(n=n, p=p, rows=rows)


def _draw_raw(marginal: HeavyTailMarginal, count: int, rng: np.random.Generator) -> np.ndarray:
    if marginal.kind == "cauchy":
        u = rng.random(count)
        return np.tan(np.pi * (u - 0.5))
    if marginal.kind == "student_t":
        nu = marginal.param
        z = rng.standard_normal(count)
        v = rng.chisquare(nu, count)
        return z / np.sqrt(v / nu)
    if marginal.kind == "pareto":
        alpha = marginal.param
        u = rng.random(count)
        magnitude = (1.0 - u) ** (-1.0 / alpha)
        sign = np.where(rng.random(count) < 0.5, -1.0, 1.0)
        return sign * magnitude
    # centered_chisq1: chi^2(1) has mean 1 and variance 2
    z = rng.standard_normal(count)
    return (z * z - 1.0) / np.sqrt(2.0)


def draw_marginal(marginal: HeavyTailMarginal, count: int, seed: SeedSpec) -> np.ndarray:
    """i.i.d. draws from the raw (pre-projection) coordinate law."""
    if count < 1:
        raise ValueError("count must be positive")
    return _draw_raw(marginal, count, seed.generator())


def sample_alpha_spherical(
    n: int, p: int, marginal: HeavyTailMarginal, seed: SeedSpec
) -> SphericalSample:
    """Rows are (X_1..X_p)/||X|| with i.i.d. heavy-tailed coordinates."""
    if n < 1 or p < 1:
        raise ValueError("n and p must be positive")
    rng = seed.generator()
    raw = _draw_raw(marginal, n * p, rng).reshape(n, p)
    rows = _normalize_rows(
        raw,
        lambda k: _draw_raw(marginal, k * p, rng).reshape(k, p),
        f"alpha-spherical sampler ({marginal.kind})",
    )
    return SphericalSample(n=n, p=p, rows=rows)


def _fvml_cosines(n: int, p: int, kappa: float, rng: np.random.Generator) -> np.ndarray:
    """Cosines t = mu.x under FvML via Wood's rejection sampler.

    Target density on [-1, 1] is proportional to exp(kappa*t)(1-t^2)^{(p-3)/2};
    the envelope is a transformed Beta((p-1)/2, (p-1)/2).  At kappa=0 every
    proposal is accepted and t is exactly the null cosine law.
    """
    d = p - 1
    # b = (-2k + sqrt(4k^2 + d^2))/d, written to avoid cancellation at large kappa
    b = d / (2.0 * kappa + np.sqrt(4.0 * kappa * kappa + d * d))
    x0 = (1.0 - b) / (1.0 + b)
    c = kappa * x0 + d * np.log1p(-x0 * x0)

    out = np.empty(n)
    filled = 0
    rounds = 0
    while filled < n:
        rounds += 1
        if rounds > 1000:
            raise RuntimeError("FvML cosine sampler failed to accept after 1000 rounds")
        m = n - filled
        z = rng.beta(0.5 * d, 0.5 * d, size=m)
        w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z)
        u = rng.random(m)
        accept = kappa * w + d * np.log1p(-x0 * w) - c >= np.log(u)
        kept = w[accept]
        out[filled : filled + kept.size] = kept
        filled += kept.size
    return np.clip(out, -1.0, 1.0)


def _fvml_rows(
    n: int, p: int, kappa: float, mu: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    t = _fvml_cosines(n, p, kappa, rng)
    raw = rng.standard_normal((n, p))
    raw -= np.outer(raw @ mu, mu)

    def redraw_tangent(k: int) -> np.ndarray:
        fresh = rng.standard_normal((k, p))
        return fresh - np.outer(fresh @ mu, mu)

    xi = _normalize_rows(raw, redraw_tangent, "FvML tangent sampler")
    rows = t[:, None] * mu[None, :] + np.sqrt(1.0 - t * t)[:, None] * xi
    rows /= np.linalg.norm(rows, axis=1)[:, None]
    return rows


def sample_fvml(
    n: int, p: int, kappa: float, direction: np.ndarray, seed: SeedSpec
) -> SphericalSample:
    """i.i.d. FvML(kappa, direction) rows via tangent-normal decomposition.

    Each row is t*mu + sqrt(1-t^2)*xi with t from the rejection sampler
    and xi uniform on the equator orthogonal to mu.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if p < 2:
        raise ValueError("FvML sampling needs p >= 2")
    if kappa < 0:
        raise ValueError("kappa must be >= 0")
    mu = np.asarray(direction, dtype=np.float64)
    if mu.shape != (p,):
        raise ValueError(f"direction must have shape ({p},)")
    if abs(float(np.linalg.norm(mu)) - 1.0) > UNIT_NORM_TOL:
        raise ValueError("direction must have unit norm within 1e-12")
    rows = _fvml_rows(n, p, float(kappa), mu, seed.generator())
    return SphericalSample(n=n, p=p, rows=rows)


def sample_from_model(model: AlternativeModel, n: int, p: int, seed: SeedSpec) -> SphericalSample:
    """Dispatch on an AlternativeModel; one stream drives everything."""
    if model.kind == "uniform":
        return sample_uniform_sphere(n, p, seed)
    if model.kind == "alpha_spherical":
        return sample_alpha_spherical(n, p, model.marginal, seed)
    if model.direction is not None:
        return sample_fvml(n, p, model.kappa, model.direction, seed)
    if p < 2:
        raise ValueError("FvML sampling needs p >= 2")
    # fresh direction per call, drawn ahead of the FvML stream proper
    rng = seed.generator()
    mu = rng.standard_normal(p)
    mu /= np.linalg.norm(mu)
    rows = _fvml_rows(n, p, float(model.kappa), mu, rng)
    return SphericalSample(n=n, p=p, rows=rows)
