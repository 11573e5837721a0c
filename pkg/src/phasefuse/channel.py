# phasefuse/channel.py
"""Scenario sampling and path-loss channel generation.

Channel model: h_i = d_i^{-alpha} * [e^{j g_{i,1}}, ..., e^{j g_{i,M}}]^T
with phases i.i.d. uniform on [0, 2pi). Sensor measurement noise v is
circularly-symmetric complex Gaussian with diagonal covariance
diag(sigma_v^2), FC noise n is CN(0, sigma_n^2 I_M).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .rng import RngStream

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class ScenarioConfig:
    """Sampling template for scenarios (fixed counts plus parameter ranges)."""

    n_sensors: int
    n_antennas: int
    path_loss_exp: float = 1.0
    fc_noise_power: float = 0.1
    distance_range: tuple[float, float] = (2.0, 7.0)
    sensor_noise_range: tuple[float, float] = (0.001, 0.01)
    theta: complex = 1.0 + 0.0j

    def __post_init__(self):
        if self.n_sensors < 1 or self.n_antennas < 1:
            raise ConfigurationError("n_sensors and n_antennas must be >= 1")
        if self.fc_noise_power <= 0:
            raise ConfigurationError("fc_noise_power must be positive")
        for name, (lo, hi) in (
            ("distance_range", self.distance_range),
            ("sensor_noise_range", self.sensor_noise_range),
        ):
            if lo <= 0 or lo > hi:
                raise ConfigurationError(
                    f"{name} must be a positive interval with low <= high, got ({lo}, {hi})"
                )


@dataclass(frozen=True)
class Scenario:
    """One static problem instance: counts, noise powers, sensor distances."""

    n_sensors: int
    n_antennas: int
    path_loss_exp: float
    fc_noise_power: float
    distances: np.ndarray
    sensor_noise_powers: np.ndarray
    theta: complex = 1.0 + 0.0j

    def __post_init__(self):
        d = np.asarray(self.distances, dtype=float)
        sv = np.asarray(self.sensor_noise_powers, dtype=float)
        object.__setattr__(self, "distances", d)
        object.__setattr__(self, "sensor_noise_powers", sv)
        if d.shape != (self.n_sensors,) or sv.shape != (self.n_sensors,):
            raise ConfigurationError(
                "distances and sensor_noise_powers must have length n_sensors"
            )
        if np.any(d <= 0):
            raise ConfigurationError("distances must be strictly positive")
        # Zero sensor/FC noise is allowed for noiseless synthesis; estimator
        # routines that need invertibility check fc_noise_power themselves.
        if np.any(sv < 0) or self.fc_noise_power < 0 or self.path_loss_exp < 0:
            raise ConfigurationError("noise powers and path_loss_exp must be nonnegative")


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of the M x N channel, |H[m, i]| = d_i^{-alpha} exactly."""

    matrix: np.ndarray  # (M, N) complex
    phases: np.ndarray  # (M, N) real in [0, 2pi)


def sample_scenario(config: ScenarioConfig, rng: RngStream) -> Scenario:
    """Draw d_i and sigma_{v,i}^2 uniformly from the config ranges."""
    gen = rng.generator()
    n = config.n_sensors
    d = gen.uniform(config.distance_range[0], config.distance_range[1], size=n)
    sv = gen.uniform(config.sensor_noise_range[0], config.sensor_noise_range[1], size=n)
    return Scenario(
        n_sensors=n,
        n_antennas=config.n_antennas,
        path_loss_exp=config.path_loss_exp,
        fc_noise_power=config.fc_noise_power,
        distances=d,
        sensor_noise_powers=sv,
        theta=config.theta,
    )


def generate_channel(scenario: Scenario, rng: RngStream) -> ChannelRealization:
    """Draw H[m, i] = d_i^{-alpha} e^{j g_{i,m}}, phases uniform on [0, 2pi)."""
    gen = rng.generator()
    m, n = scenario.n_antennas, scenario.n_sensors
    phases = gen.uniform(0.0, TWO_PI, size=(m, n))
    amps = scenario.distances ** (-scenario.path_loss_exp)  # (N,)
    matrix = amps[np.newaxis, :] * np.exp(1j * phases)
    return ChannelRealization(matrix=matrix, phases=phases)


def _complex_gaussian(gen: np.random.Generator, variances: np.ndarray, size) -> np.ndarray:
    """Circularly-symmetric CN(0, diag(variances)); variance split evenly
    between real and imaginary parts."""
    scale = np.sqrt(np.asarray(variances, dtype=float) / 2.0)
    re = gen.standard_normal(size)
    im = gen.standard_normal(size)
    return scale * (re + 1j * im)


def synthesize_received_signal(
    scenario: Scenario,
    channel: ChannelRealization,
    a: np.ndarray,
    rng: RngStream,
) -> np.ndarray:
    """One received vector y = H a theta + H D v + n at the fusion center."""
    a = np.asarray(a)
    if a.shape != (scenario.n_sensors,):
        raise ConfigurationError(
            f"phase vector has shape {a.shape}, expected ({scenario.n_sensors},)"
        )
    gen = rng.generator()
    v = _complex_gaussian(gen, scenario.sensor_noise_powers, scenario.n_sensors)
    n = _complex_gaussian(
        gen, np.full(scenario.n_antennas, scenario.fc_noise_power), scenario.n_antennas
    )
    h = channel.matrix
    return h @ (a * scenario.theta) + h @ (a * v) + n
