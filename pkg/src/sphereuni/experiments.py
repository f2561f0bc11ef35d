"""Seeded Monte Carlo experiments: size/power tables and asymptotic diagnostics.

Every replication i draws its sample from the stream (master_seed, i),
so results are identical no matter how many worker threads run them.
Aggregation only ever sums integer tallies and reduces arrays indexed by
replication, which keeps it schedule-independent.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import stats as scipy_stats

from . import stats as stats_mod
from .nulldist import NullLaw, upper_p_value
from .sampling import (
    AlternativeModel,
    HeavyTailMarginal,
    SeedSpec,
    sample_from_model,
)
from .stats import TestOutcome, run_all_tests

__all__ = [
    "TEST_NAMES",
    "TABLE1_SCENARIOS",
    "PROSE_SCENARIOS",
    "POWER_MARGINALS",
    "ExperimentPlan",
    "TestAggregate",
    "ExperimentResult",
    "DiagnosticReport",
    "run_rejection_experiment",
    "run_rayleigh_blindness_diagnostic",
    "run_bingham_scaling_diagnostic",
    "run_packing_lln_diagnostic",
    "run_independence_diagnostic",
    "run_fvml_packing_blindness",
    "fvml_kappa",
]

TEST_NAMES = ("rayleigh", "bingham", "packing", "fisher")

# scenario triple from the published size table; the accompanying prose
# instead lists (80, 100), which PROSE_SCENARIOS keeps reachable
TABLE1_SCENARIOS = ((80, 40), (100, 100), (100, 120))
PROSE_SCENARIOS = ((80, 100), (100, 100), (100, 120))

POWER_MARGINALS = (
    HeavyTailMarginal.centered_chisq1(),
    HeavyTailMarginal.cauchy(),
    HeavyTailMarginal.student_t(1.5),
)

_QUANTILE_KEYS = (("q05", 0.05), ("q50", 0.50), ("q95", 0.95))


@dataclass(frozen=True)
class ExperimentPlan:
    n: int
    p: int
    model: AlternativeModel
    replications: int
    level: float = 0.05
    master_seed: int = 0
    tests: tuple[str, ...] = TEST_NAMES

    def __post_init__(self) -> None:
        if self.n < 2 or self.p < 1:
            raise ValueError("need n >= 2 and p >= 1")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if not 0.0 < self.level < 1.0:
            raise ValueError("level must lie in (0, 1)")
        unknown = set(self.tests) - set(TEST_NAMES)
        if unknown:
            raise ValueError(f"unknown tests: {sorted(unknown)}")
        if not self.tests:
            raise ValueError("tests must be non-empty")
        if self.n < 3 and ("packing" in self.tests or "fisher" in self.tests):
            raise ValueError("packing/fisher tests need n >= 3")


@dataclass(frozen=True)
class TestAggregate:
    rejections: int
    rate: float
    standard_error: float
    stat_mean: float
    stat_sd: float
    stat_quantiles: dict[str, float]


@dataclass(frozen=True)
class ExperimentResult:
    plan: ExperimentPlan
    replications_completed: int
    per_test: dict[str, TestAggregate]


@dataclass(frozen=True)
class DiagnosticReport:
    """Named scalar metrics from one diagnostic run."""

    kind: str
    metrics: dict[str, float]

    def __post_init__(self) -> None:
        for key, value in self.metrics.items():
            if not math.isfinite(value):
                raise ValueError(f"diagnostic metric {key} is not finite: {value}")


def _resolve_workers(threads: int) -> int:
    if threads < 0:
        raise ValueError("threads must be >= 0")
    if threads == 0:
        return min(8, os.cpu_count() or 1)
    return threads


def _map_replications(fn: Callable[[int], object], replications: int, threads: int) -> list:
    """Apply fn to every replication index, results in index order."""
    workers = _resolve_workers(threads)
    if workers == 1 or replications == 1:
        return [fn(i) for i in range(replications)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(replications)))


def _one_replication(
    model: AlternativeModel, n: int, p: int, level: float, master_seed: int, index: int
) -> dict[str, TestOutcome]:
    try:
        sample = sample_from_model(model, n, p, SeedSpec(master_seed, index))
        if n >= 3:
            outcomes = run_all_tests(sample, level)
        else:
            # n=2 is legal only for plans without packing/fisher
            summary = stats_mod.pairwise_summary(sample)
            outcomes = []
            for name, stat in (
                ("rayleigh", stats_mod.rayleigh_statistic(summary)),
                ("bingham", stats_mod.bingham_statistic(summary)),
            ):
                p_val = upper_p_value(NullLaw.STANDARD_NORMAL, stat)
                outcomes.append(
                    TestOutcome(
                        test=name, statistic=stat, p_value=p_val,
                        reject=p_val <= level, level=level,
                    )
                )
    except Exception as exc:
        raise RuntimeError(f"replication {index} failed: {exc}") from exc
    return {o.test: o for o in outcomes}


def _collect(
    model: AlternativeModel,
    n: int,
    p: int,
    replications: int,
    level: float,
    master_seed: int,
    threads: int,
    seed_offset: int = 0,
) -> dict[str, dict[str, np.ndarray]]:
    """Statistic and rejection arrays per test, indexed by replication."""
    rows = _map_replications(
        lambda i: _one_replication(model, n, p, level, master_seed, seed_offset + i),
        replications,
        threads,
    )
    out: dict[str, dict[str, np.ndarray]] = {}
    for name in rows[0]:
        out[name] = {
            "statistic": np.array([r[name].statistic for r in rows]),
            "reject": np.array([r[name].reject for r in rows], dtype=bool),
        }
    return out


def _aggregate(statistic: np.ndarray, reject: np.ndarray) -> TestAggregate:
    reps = reject.size
    k = int(reject.sum())
    rate = k / reps
    quantiles = {
        key: float(np.quantile(statistic, q)) for key, q in _QUANTILE_KEYS
    }
    return TestAggregate(
        rejections=k,
        rate=rate,
        standard_error=math.sqrt(rate * (1.0 - rate) / reps),
        stat_mean=float(statistic.mean()),
        stat_sd=float(statistic.std(ddof=1)) if reps > 1 else 0.0,
        stat_quantiles=quantiles,
    )


def run_rejection_experiment(plan: ExperimentPlan, threads: int = 0) -> ExperimentResult:
    """Monte Carlo rejection rates for the planned tests.

    Replications may run concurrently; each one draws from its own
    stream (master_seed, i), so the result depends only on the plan.
    """
    collected = _collect(
        plan.model, plan.n, plan.p, plan.replications, plan.level, plan.master_seed, threads
    )
    per_test = {
        name: _aggregate(collected[name]["statistic"], collected[name]["reject"])
        for name in plan.tests
    }
    return ExperimentResult(
        plan=plan, replications_completed=plan.replications, per_test=per_test
    )


def _require_symmetric(marginal: HeavyTailMarginal, what: str) -> None:
    if not marginal.is_symmetric:
        raise ValueError(f"{what} requires a symmetric marginal, got {marginal.kind}")


def _require_tail_index(marginal: HeavyTailMarginal, what: str) -> float:
    alpha = marginal.tail_index
    if alpha is None:
        raise ValueError(f"{what} needs a regular-variation index in (0, 2)")
    return alpha


def run_rayleigh_blindness_diagnostic(
    n: int,
    p: int,
    marginal: HeavyTailMarginal,
    replications: int,
    master_seed: int,
    level: float = 0.05,
    threads: int = 0,
) -> DiagnosticReport:
    """How close the mean-direction statistic stays to N(0,1) under the
    symmetric heavy-tailed alternative (where it is asymptotically blind)."""
    _require_symmetric(marginal, "rayleigh blindness diagnostic")
    model = AlternativeModel.alpha_spherical(marginal)
    collected = _collect(model, n, p, replications, level, master_seed, threads)
    values = collected["rayleigh"]["statistic"]
    ks = scipy_stats.kstest(values, "norm")
    return DiagnosticReport(
        kind="rayleigh-blindness",
        metrics={
            "ks_distance": float(ks.statistic),
            "ks_pvalue": float(ks.pvalue),
            "rejection_rate": float(collected["rayleigh"]["reject"].mean()),
            "stat_mean": float(values.mean()),
            "stat_sd": float(values.std(ddof=1)),
        },
    )


def run_bingham_scaling_diagnostic(
    n: int,
    p: int,
    marginal: HeavyTailMarginal,
    replications: int,
    master_seed: int,
    level: float = 0.05,
    threads: int = 0,
) -> DiagnosticReport:
    """Spread of sqrt(n)/p times the axial statistic against its
    heavy-tailed limit sd (2-alpha)/sqrt(8*gamma) with gamma = p/n."""
    _require_symmetric(marginal, "bingham scaling diagnostic")
    alpha = _require_tail_index(marginal, "bingham scaling diagnostic")
    gamma = p / n
    model = AlternativeModel.alpha_spherical(marginal)
    collected = _collect(model, n, p, replications, level, master_seed, threads)
    scaled = math.sqrt(n) / p * collected["bingham"]["statistic"]
    theoretical_sd = (2.0 - alpha) / math.sqrt(8.0 * gamma)
    empirical_sd = float(scaled.std(ddof=1))
    return DiagnosticReport(
        kind="bingham-scaling",
        metrics={
            "alpha": alpha,
            "gamma": gamma,
            "empirical_mean": float(scaled.mean()),
            "empirical_sd": empirical_sd,
            "theoretical_sd": theoretical_sd,
            "sd_ratio": empirical_sd / theoretical_sd,
            "rejection_rate": float(collected["bingham"]["reject"].mean()),
        },
    )


def _max_abs_from_packing(packing: np.ndarray, n: int, p: int) -> np.ndarray:
    # invert packing = p*m^2 - 4 log n + log log n
    m2 = (packing + 4.0 * math.log(n) - math.log(math.log(n))) / p
    return np.sqrt(np.maximum(m2, 0.0))


def run_packing_lln_diagnostic(
    n: int,
    p: int,
    model: AlternativeModel | HeavyTailMarginal,
    replications: int,
    master_seed: int,
    level: float = 0.05,
    threads: int = 0,
) -> DiagnosticReport:
    """Location of the largest absolute inner product: near 1 under
    heavy tails, near sqrt(4 log n / p) under uniformity.

    Accepts a bare marginal (wrapped as its spherical projection) or any
    AlternativeModel, so the uniform reference runs through the same path.
    """
    if isinstance(model, HeavyTailMarginal):
        model = AlternativeModel.alpha_spherical(model)
    collected = _collect(model, n, p, replications, level, master_seed, threads)
    max_abs = _max_abs_from_packing(collected["packing"]["statistic"], n, p)
    return DiagnosticReport(
        kind="packing-lln",
        metrics={
            "median_max_abs_inner": float(np.quantile(max_abs, 0.5)),
            "q10_max_abs_inner": float(np.quantile(max_abs, 0.1)),
            "null_max_reference": math.sqrt(4.0 * math.log(n) / p),
            "packing_rate": float(collected["packing"]["reject"].mean()),
        },
    )


def run_independence_diagnostic(
    n: int,
    p: int,
    replications: int,
    level: float,
    master_seed: int,
    threads: int = 0,
) -> DiagnosticReport:
    """Pairwise correlations and the joint-below-medians probability of
    the three statistics under uniformity, plus the combined test's size."""
    if p < 5.0 * math.log(n) ** 2:
        warnings.warn(
            f"independence diagnostic at p={p}, n={n}: the asymptotic regime "
            f"expects p well above (log n)^2 = {math.log(n) ** 2:.1f}",
            stacklevel=2,
        )
    collected = _collect(
        AlternativeModel.uniform(), n, p, replications, level, master_seed, threads
    )
    r = collected["rayleigh"]["statistic"]
    b = collected["bingham"]["statistic"]
    pk = collected["packing"]["statistic"]
    below = [(v <= np.quantile(v, 0.5)) for v in (r, b, pk)]
    joint = float((below[0] & below[1] & below[2]).mean())
    return DiagnosticReport(
        kind="independence",
        metrics={
            "corr_rb": float(np.corrcoef(r, b)[0, 1]),
            "corr_rp": float(np.corrcoef(r, pk)[0, 1]),
            "corr_bp": float(np.corrcoef(b, pk)[0, 1]),
            "joint_at_medians": joint,
            "joint_vs_product_gap": abs(joint - 0.125),
            "fisher_size": float(collected["fisher"]["reject"].mean()),
        },
    )


def fvml_kappa(n: int, p: int, tau: float) -> float:
    """Concentration tau * p^(3/4) / sqrt(n), the detection-boundary rate."""
    return tau * p**0.75 / math.sqrt(n)


def run_fvml_packing_blindness(
    n: int,
    p: int,
    tau: float,
    replications: int,
    master_seed: int,
    level: float = 0.05,
    threads: int = 0,
) -> DiagnosticReport:
    """Packing vs Rayleigh behaviour at the FvML detection boundary.

    Draws FvML samples at kappa = tau * p^(3/4)/sqrt(n) with a fresh
    random direction each replication, plus a matched uniform run with
    disjoint streams.  At this rate the packing test should keep its
    null rejection rate while the mean-direction test gains power.
    """
    if tau < 0:
        raise ValueError("tau must be >= 0")
    if p < 2:
        raise ValueError("need p >= 2")
    kappa = fvml_kappa(n, p, tau)
    alt = _collect(
        AlternativeModel.fvml(kappa), n, p, replications, level, master_seed, threads
    )
    null = _collect(
        AlternativeModel.uniform(), n, p, replications, level, master_seed, threads,
        seed_offset=replications,
    )
    packing_rate = float(alt["packing"]["reject"].mean())
    packing_rate_null = float(null["packing"]["reject"].mean())
    ks = scipy_stats.ks_2samp(
        alt["packing"]["statistic"], null["packing"]["statistic"]
    )
    return DiagnosticReport(
        kind="fvml-blindness",
        metrics={
            "kappa": kappa,
            "packing_rate": packing_rate,
            "packing_rate_null": packing_rate_null,
            "packing_rate_gap": abs(packing_rate - packing_rate_null),
            "rayleigh_rate": float(alt["rayleigh"]["reject"].mean()),
            "rayleigh_rate_null": float(null["rayleigh"]["reject"].mean()),
            "ks_distance_packing_vs_null": float(ks.statistic),
            "ks_pvalue_packing_vs_null": float(ks.pvalue),
        },
    )
