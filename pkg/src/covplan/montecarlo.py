"""Seeded Monte-Carlo trials and parameter sweeps.

A trial generates an environment, plans coverage, and evaluates the
metrics; its randomness is a pure function of (master_seed, arm_index,
trial_index, attempt), derived through ``numpy.random.SeedSequence``:

    ss = SeedSequence([master_seed, arm_index, trial_index, attempt])
    param_ss, env_ss = ss.spawn(2)

``param_ss`` draws any ranged environment parameters (uniform sampling
mode) in fixed field order; the first 64-bit word of ``env_ss`` becomes
the environment seed. Parallel scheduling therefore cannot perturb
results: sweeps emit byte-identical tables for any worker count.

Degenerate trials (no free cells) are regenerated with the attempt
counter bumped, up to ``MAX_ATTEMPTS``; regenerations are counted and
logged, never silently hidden.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .envgen import EnvGenParams, generate_environment
from .errors import CovplanError, ParameterError
from .metrics import MetricsRecord, evaluate
from .planner import PlanConfig, plan

log = logging.getLogger(__name__)

MAX_ATTEMPTS = 5

# float or (low, high) for per-trial uniform sampling
ParamSpec = float | tuple[float, float]

SWEEPABLE = (
    "sample_spacing",
    "distribution_density",
    "distribution_heterogeneity",
    "obstacle_density",
    "obstacle_heterogeneity",
)


def _resolve(spec: ParamSpec, rng: np.random.Generator) -> float:
    if isinstance(spec, tuple):
        lo, hi = spec
        return float(lo + (hi - lo) * rng.random())
    return float(spec)


@dataclass(frozen=True)
class EnvArm:
    """One environment family: fixed values or (low, high) ranges."""

    distribution_density: ParamSpec
    distribution_heterogeneity: ParamSpec
    obstacle_density: ParamSpec
    obstacle_heterogeneity: ParamSpec


@dataclass(frozen=True)
class TrialConfig:
    """Everything one trial depends on."""

    width: int
    height: int
    arm: EnvArm
    plan_config: PlanConfig
    trial_index: int
    master_seed: int
    arm_index: int = 0
    threshold: float = 0.5


@dataclass(frozen=True)
class TrialRow:
    """One executed trial: resolved parameters plus its metrics."""

    config: TrialConfig
    params: EnvGenParams | None
    record: MetricsRecord | None
    attempts: int

    @property
    def valid(self) -> bool:
        return self.record is not None


def _trial_params(config: TrialConfig, attempt: int) -> EnvGenParams:
    ss = np.random.SeedSequence(
        [int(config.master_seed), int(config.arm_index),
         int(config.trial_index), int(attempt)])
    param_ss, env_ss = ss.spawn(2)
    rng = np.random.default_rng(param_ss)
    arm = config.arm
    return EnvGenParams(
        width=config.width,
        height=config.height,
        distribution_density=_resolve(arm.distribution_density, rng),
        distribution_heterogeneity=_resolve(arm.distribution_heterogeneity, rng),
        obstacle_density=_resolve(arm.obstacle_density, rng),
        obstacle_heterogeneity=_resolve(arm.obstacle_heterogeneity, rng),
        threshold=config.threshold,
        seed=int(env_ss.generate_state(1, np.uint64)[0]),
    )


def run_trial_detail(config: TrialConfig) -> TrialRow:
    """Run one trial with bounded regeneration of degenerate environments."""
    last_error: Exception | None = None
    for attempt in range(MAX_ATTEMPTS):
        params = _trial_params(config, attempt)
        try:
            env = generate_environment(params)
            result = plan(env, config.plan_config)
            record = evaluate(env, result)
        except CovplanError as exc:
            last_error = exc
            log.warning("trial %d/%d attempt %d failed: %s",
                        config.arm_index, config.trial_index, attempt, exc)
            continue
        return TrialRow(config=config, params=params, record=record,
                        attempts=attempt + 1)
    log.error("trial %d/%d invalid after %d attempts: %s",
              config.arm_index, config.trial_index, MAX_ATTEMPTS, last_error)
    return TrialRow(config=config, params=None, record=None, attempts=MAX_ATTEMPTS)


def run_trial(config: TrialConfig) -> MetricsRecord:
    """Run one deterministic trial and return its metrics."""
    row = run_trial_detail(config)
    if row.record is None:
        raise CovplanError(
            f"trial {config.trial_index} produced no valid environment "
            f"after {MAX_ATTEMPTS} attempts")
    return row.record


@dataclass(frozen=True)
class MetricStats:
    """Mean / spread of one metric over the trials where it is defined."""

    mean: float | None
    std: float | None
    stderr: float | None
    n_valid: int
    n_total: int


@dataclass(frozen=True)
class AggregateStats:
    """Per-metric aggregates for one sweep arm."""

    rmse: MetricStats
    hmr: MetricStats
    path_length: MetricStats
    sample_count: MetricStats


def _metric_stats(values: list[float], n_total: int) -> MetricStats:
    n = len(values)
    if n == 0:
        return MetricStats(None, None, None, 0, n_total)
    if values[0] == values[-1]:
        # constant metric: its mean is that constant, exactly
        return MetricStats(values[0], 0.0 if n > 1 else None,
                           0.0 if n > 1 else None, n, n_total)
    mean = float(np.mean(values))
    if n == 1:
        return MetricStats(mean, None, None, 1, n_total)
    std = float(np.std(values, ddof=1))
    return MetricStats(mean, std, float(std / np.sqrt(n)), n, n_total)


def aggregate(records: Sequence[MetricsRecord]) -> AggregateStats:
    """Mean / std / stderr per metric, skipping undefined values.

    Order-independent: statistics are computed over the multiset of
    defined values only, with the defined count reported alongside the
    total.
    """
    n = len(records)

    def collect(name: str) -> MetricStats:
        vals = sorted(float(getattr(r, name)) for r in records
                      if getattr(r, name) is not None)
        return _metric_stats(vals, n)

    return AggregateStats(
        rmse=collect("rmse"),
        hmr=collect("hmr"),
        path_length=collect("path_length"),
        sample_count=collect("sample_count"),
    )


@dataclass(frozen=True)
class SweepConfig:
    """A full experiment: swept parameter x environment arms x preprocessing."""

    swept_parameter: str
    values: tuple
    trials_per_value: int
    env_arms: tuple[EnvArm, ...]
    preprocess_arms: tuple[bool, ...] = (False,)
    width: int = 30
    height: int = 30
    threshold: float = 0.5
    sample_spacing: int = 1

    def __post_init__(self) -> None:
        if self.swept_parameter not in SWEEPABLE:
            raise ParameterError(
                f"swept_parameter must be one of {SWEEPABLE}")
        if not self.values:
            raise ParameterError("values must be non-empty")
        if self.trials_per_value < 1:
            raise ParameterError("trials_per_value must be >= 1")
        if not self.env_arms:
            raise ParameterError("env_arms must be non-empty")
        if not self.preprocess_arms:
            raise ParameterError("preprocess_arms must be non-empty")


@dataclass(frozen=True)
class SweepArm:
    """One aggregated table row-to-be."""

    arm_index: int
    value: object
    env_arm: EnvArm
    preprocess: bool
    spacing: int


@dataclass(frozen=True)
class SweepResult:
    """All per-arm aggregates plus the raw per-trial rows."""

    arms: tuple[SweepArm, ...]
    stats: tuple[AggregateStats, ...]
    trials: tuple[TrialRow, ...]


def enumerate_arms(config: SweepConfig) -> list[SweepArm]:
    """Arm order (and hence arm_index): value, then env arm, then preprocess."""
    arms = []
    for value in config.values:
        for env_arm in config.env_arms:
            for pre in config.preprocess_arms:
                if config.swept_parameter == "sample_spacing":
                    spacing = int(value)
                else:
                    spacing = config.sample_spacing
                    env_arm = replace(env_arm, **{config.swept_parameter: value})
                arms.append(SweepArm(
                    arm_index=len(arms), value=value, env_arm=env_arm,
                    preprocess=pre, spacing=spacing,
                ))
    return arms


def run_sweep(config: SweepConfig, master_seed: int, jobs: int = 1) -> SweepResult:
    """Run every arm of the sweep; deterministic for any ``jobs``.

    Trials are independent pure computations keyed by (arm, trial), so
    they may execute in any order on any number of workers; results are
    assembled in arm-major, trial-minor order regardless.
    """
    arms = enumerate_arms(config)
    configs = [
        TrialConfig(
            width=config.width, height=config.height, arm=arm.env_arm,
            plan_config=PlanConfig(sample_spacing=arm.spacing, preprocess=arm.preprocess),
            trial_index=t, master_seed=master_seed, arm_index=arm.arm_index,
            threshold=config.threshold,
        )
        for arm in arms
        for t in range(config.trials_per_value)
    ]
    if jobs <= 1:
        rows = [run_trial_detail(c) for c in configs]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(run_trial_detail, configs,
                                 chunksize=max(1, len(configs) // (jobs * 8) or 1)))

    n = config.trials_per_value
    stats = []
    for arm in arms:
        arm_rows = rows[arm.arm_index * n:(arm.arm_index + 1) * n]
        stats.append(aggregate([r.record for r in arm_rows if r.record is not None]))
    return SweepResult(arms=tuple(arms), stats=tuple(stats), trials=tuple(rows))
