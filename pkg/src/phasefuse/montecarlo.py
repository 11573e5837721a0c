# phasefuse/montecarlo.py
"""Seeded Monte Carlo experiment harness.

Sweeps the sensor count N (antenna count fixed) or the antenna count M
(sensor count fixed), runs independent trials per sweep point, and
aggregates mean variance and standard error per phase strategy. Trial t of
point p uses the random stream (master_seed, p * trials + t), so results
are a pure function of the config and identical for any worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from . import asymptotics
from .channel import (
    ChannelRealization,
    Scenario,
    ScenarioConfig,
    generate_channel,
    sample_scenario,
)
from .errors import ConfigurationError, ConvergenceError
from .estimator import fisher_matrix, noise_covariance, variance_lower_bound
from .phase_opt import (
    ALL_ONES,
    SDP_RELAXATION,
    PhaseStrategy,
    eigenvector_rounding,
    optimize_phases,
)
from .rng import RngStream

SENSOR_SWEEP = "sensors"
ANTENNA_SWEEP = "antennas"

THREADS_ENV_VAR = "PHASEFUSE_THREADS"

DEFAULT_STRATEGIES = (PhaseStrategy(SDP_RELAXATION), PhaseStrategy(ALL_ONES))


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one sweep experiment."""

    sweep: str                       # SENSOR_SWEEP or ANTENNA_SWEEP
    sweep_values: tuple[int, ...]
    fixed_count: int                 # M for a sensor sweep, N for an antenna sweep
    trials: int = 300
    master_seed: int = 0
    strategies: tuple[PhaseStrategy, ...] = DEFAULT_STRATEGIES
    path_loss_exp: float = 1.0
    fc_noise_power: float = 0.1
    distance_range: tuple[float, float] = (2.0, 7.0)
    sensor_noise_range: tuple[float, float] = (0.001, 0.01)
    theta: complex = 1.0 + 0.0j
    resample_scenario_per_trial: bool = True
    include_asymptotics: bool = True
    n_workers: int | None = None

    def __post_init__(self):
        if self.sweep not in (SENSOR_SWEEP, ANTENNA_SWEEP):
            raise ConfigurationError(f"unknown sweep kind {self.sweep!r}")
        vals = tuple(int(v) for v in self.sweep_values)
        object.__setattr__(self, "sweep_values", vals)
        if not vals or any(v < 1 for v in vals):
            raise ConfigurationError("sweep_values must be nonempty positive integers")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ConfigurationError("sweep_values must be strictly increasing")
        if self.trials < 1:
            raise ConfigurationError("trials must be >= 1")
        if not self.strategies:
            raise ConfigurationError("at least one strategy is required")

    def scenario_config(self, sweep_value: int) -> ScenarioConfig:
        n, m = (
            (sweep_value, self.fixed_count)
            if self.sweep == SENSOR_SWEEP
            else (self.fixed_count, sweep_value)
        )
        return ScenarioConfig(
            n_sensors=n,
            n_antennas=m,
            path_loss_exp=self.path_loss_exp,
            fc_noise_power=self.fc_noise_power,
            distance_range=self.distance_range,
            sensor_noise_range=self.sensor_noise_range,
            theta=self.theta,
        )


@dataclass
class StrategyStats:
    mean_variance: float
    std_err: float
    failures: int


@dataclass
class PointResult:
    sweep_value: int
    trials: int
    strategy_stats: dict[str, StrategyStats]
    lower_bound_mean: float
    eq11: float | None = None   # large-N lower bound, mean over trials
    eq12: float | None = None   # single-antenna upper bound, mean over trials
    eq17: float | None = None   # large-M variance law, mean over trials
    degraded: bool = False      # >1% of trials needed the convergence fallback


@dataclass
class SweepResult:
    sweep_param: str
    points: list[PointResult]
    config: ExperimentConfig


def resolve_workers(requested: int | None) -> int:
    env = os.environ.get(THREADS_ENV_VAR)
    if env is not None:
        return max(1, int(env))
    return max(1, requested or 1)


@dataclass
class _TrialOutcome:
    lower_bound: float
    variances: dict[str, float]
    failed: dict[str, bool]
    eq11: float
    eq12: float
    eq17: float


def _run_trial(
    config: ExperimentConfig,
    scn_config: ScenarioConfig,
    stream: RngStream,
    fixed_scenario: Scenario | None,
) -> _TrialOutcome:
    scenario = fixed_scenario or sample_scenario(scn_config, stream.child(0))
    channel = generate_channel(scenario, stream.child(1))
    b = fisher_matrix(channel, scenario)
    lb = variance_lower_bound(b, scenario.n_sensors)

    variances: dict[str, float] = {}
    failed: dict[str, bool] = {}
    for k, strategy in enumerate(config.strategies):
        try:
            report = optimize_phases(b, strategy, stream.child(2 + k))
            variances[strategy.label] = report.achieved_variance
            failed[strategy.label] = False
        except ConvergenceError:
            # Never drop a trial: fall back to leading-eigenvector rounding.
            a = eigenvector_rounding(b)
            variances[strategy.label] = float(
                1.0 / np.real(np.vdot(a, b @ a))
            )
            failed[strategy.label] = True

    inputs = asymptotics.AsymptoticInputs.from_scenario(scenario)
    return _TrialOutcome(
        lower_bound=lb,
        variances=variances,
        failed=failed,
        eq11=asymptotics.large_n_lower_bound(inputs),
        eq12=asymptotics.single_antenna_upper_bound(inputs),
        eq17=asymptotics.large_m_variance(inputs),
    )


def run_sweep(config: ExperimentConfig) -> SweepResult:
    """Run the full sweep. Deterministic given the config, including under
    PHASEFUSE_THREADS > 1 (aggregation is in fixed trial order)."""
    workers = resolve_workers(config.n_workers)
    points: list[PointResult] = []

    for p, value in enumerate(config.sweep_values):
        scn_config = config.scenario_config(value)
        streams = [
            RngStream(config.master_seed, p * config.trials + t)
            for t in range(config.trials)
        ]
        fixed_scenario = None
        if not config.resample_scenario_per_trial:
            fixed_scenario = sample_scenario(scn_config, streams[0].child(0))

        def job(stream: RngStream) -> _TrialOutcome:
            return _run_trial(config, scn_config, stream, fixed_scenario)

        if workers == 1:
            outcomes = [job(s) for s in streams]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                outcomes = list(pool.map(job, streams))

        stats: dict[str, StrategyStats] = {}
        degraded = False
        for strategy in config.strategies:
            label = strategy.label
            vals = np.array([o.variances[label] for o in outcomes])
            fails = sum(o.failed[label] for o in outcomes)
            se = float(np.std(vals, ddof=1) / np.sqrt(len(vals))) if len(vals) > 1 else 0.0
            stats[label] = StrategyStats(
                mean_variance=float(np.mean(vals)), std_err=se, failures=fails
            )
            if fails > 0.01 * config.trials:
                degraded = True

        point = PointResult(
            sweep_value=value,
            trials=config.trials,
            strategy_stats=stats,
            lower_bound_mean=float(np.mean([o.lower_bound for o in outcomes])),
            degraded=degraded,
        )
        if config.include_asymptotics:
            if config.sweep == SENSOR_SWEEP:
                point.eq11 = float(np.mean([o.eq11 for o in outcomes]))
                point.eq12 = float(np.mean([o.eq12 for o in outcomes]))
            else:
                point.eq17 = float(np.mean([o.eq17 for o in outcomes]))
        points.append(point)

    return SweepResult(sweep_param=config.sweep, points=points, config=config)


@dataclass
class UnbiasednessReport:
    trials: int
    sample_mean: complex
    sample_variance: float
    predicted_variance: float
    mean_z_score: float


def verify_unbiasedness(
    scenario: Scenario,
    channel: ChannelRealization,
    a: np.ndarray,
    trials: int,
    rng: RngStream,
) -> UnbiasednessReport:
    """Monte Carlo check that the ML estimate is unbiased with the predicted
    variance. Sample variance is the total complex error power (real plus
    imaginary parts), which is what the variance formula predicts."""
    a = np.asarray(a, dtype=complex)
    h = channel.matrix
    gen = rng.generator()
    t = int(trials)

    sv = scenario.sensor_noise_powers
    v = np.sqrt(sv / 2.0) * (
        gen.standard_normal((t, scenario.n_sensors))
        + 1j * gen.standard_normal((t, scenario.n_sensors))
    )
    fc = np.sqrt(scenario.fc_noise_power / 2.0) * (
        gen.standard_normal((t, scenario.n_antennas))
        + 1j * gen.standard_normal((t, scenario.n_antennas))
    )
    ha = h @ a
    y = scenario.theta * ha[np.newaxis, :] + (a * v) @ h.T + fc

    if scenario.fc_noise_power == 0 and np.all(sv == 0):
        g = ha  # noiseless limit: matched filter recovers theta exactly
    else:
        c = noise_covariance(channel, scenario)
        g = sla.cho_solve(sla.cho_factor(c, lower=True), ha)
    q = float(np.real(np.vdot(ha, g)))
    estimates = (y @ g.conj()) / q

    mean = complex(np.mean(estimates))
    err = estimates - mean
    sample_var = float(np.sum(np.abs(err) ** 2) / max(t - 1, 1))
    predicted = 1.0 / q if q > 0 else 0.0
    std_of_mean = np.sqrt(predicted / t) if predicted > 0 else np.finfo(float).tiny
    z = abs(mean - scenario.theta) / std_of_mean
    return UnbiasednessReport(
        trials=t,
        sample_mean=mean,
        sample_variance=sample_var,
        predicted_variance=predicted,
        mean_z_score=float(z),
    )


@dataclass(frozen=True)
class ConcentrationConfig:
    mode: str = SENSOR_SWEEP           # grow N (fixed M) or grow M (fixed N)
    values: tuple[int, ...] = (250, 500, 1000, 2000, 4000)
    fixed_count: int = 4
    n_draws: int = 50
    master_seed: int = 0
    path_loss_exp: float = 1.0
    fc_noise_power: float = 0.1
    distance_range: tuple[float, float] = (2.0, 7.0)
    sensor_noise_range: tuple[float, float] = (0.001, 0.01)


@dataclass
class ConcentrationPoint:
    value: int
    applicable: bool
    rel_offdiag: np.ndarray  # per draw: max |offdiag| / mean diag
    median: float


@dataclass
class ConcentrationReport:
    mode: str
    points: list[ConcentrationPoint]


def verify_diagonal_concentration(config: ConcentrationConfig) -> ConcentrationReport:
    """Empirical decay of the off-diagonal terms of (1/N) H V H^H (sensor
    mode) or (1/M) H^H H (antenna mode) as the averaged dimension grows."""
    points: list[ConcentrationPoint] = []
    for p, value in enumerate(config.values):
        n, m = (
            (value, config.fixed_count)
            if config.mode == SENSOR_SWEEP
            else (config.fixed_count, value)
        )
        scn_config = ScenarioConfig(
            n_sensors=n,
            n_antennas=m,
            path_loss_exp=config.path_loss_exp,
            fc_noise_power=config.fc_noise_power,
            distance_range=config.distance_range,
            sensor_noise_range=config.sensor_noise_range,
        )
        applicable = value > 1
        rels = np.zeros(config.n_draws)
        for t in range(config.n_draws):
            stream = RngStream(config.master_seed, p * config.n_draws + t)
            scenario = sample_scenario(scn_config, stream.child(0))
            channel = generate_channel(scenario, stream.child(1))
            h = channel.matrix
            if config.mode == SENSOR_SWEEP:
                g = (h * scenario.sensor_noise_powers[np.newaxis, :]) @ h.conj().T / n
            else:
                g = h.conj().T @ h / m
            diag_mean = float(np.mean(np.real(np.diag(g))))
            off = g - np.diag(np.diag(g))
            rels[t] = float(np.max(np.abs(off))) / diag_mean if g.shape[0] > 1 else np.nan
        points.append(
            ConcentrationPoint(
                value=value,
                applicable=applicable and g.shape[0] > 1,
                rel_offdiag=rels,
                median=float(np.nanmedian(rels)),
            )
        )
    return ConcentrationReport(mode=config.mode, points=points)
