# phasefuse/phase_opt.py
"""Phase selection front door.

Dispatches between the two-sensor closed form, the SDP relaxation with
rank-one rounding, the all-ones (no feedback) baseline, and an exhaustive
grid oracle used for verification at small N.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from . import sdp
from .channel import ChannelRealization, Scenario
from .errors import ConfigurationError
from .estimator import estimator_variance, fisher_matrix, variance_lower_bound
from .rng import RngStream

CLOSED_FORM_N2 = "closed_form_n2"
SDP_RELAXATION = "sdp"
ALL_ONES = "all_ones"
GRID_ORACLE = "grid"

_KINDS = (CLOSED_FORM_N2, SDP_RELAXATION, ALL_ONES, GRID_ORACLE)
_GRID_MAX_SENSORS = 4


@dataclass(frozen=True)
class PhaseStrategy:
    """Named phase-selection method plus its tuning knobs."""

    kind: str
    num_candidates: int = 100      # SDP rounding pool size
    grid_step_deg: float | None = None  # grid oracle resolution; default by N

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ConfigurationError(f"unknown strategy kind {self.kind!r}")
        if self.num_candidates < 1:
            raise ConfigurationError("num_candidates must be >= 1")

    @property
    def label(self) -> str:
        return self.kind


@dataclass
class OptimizationReport:
    """Chosen phases with the achieved variance and its certificates."""

    phases: np.ndarray
    achieved_variance: float
    lower_bound: float
    relaxation_value: float | None
    strategy: PhaseStrategy


def optimize_phases_n2(b: np.ndarray) -> np.ndarray:
    """Two-sensor optimum a = (e^{j arg(B12)}, 1).

    Maximizes a^H B a = B11 + B22 + 2 Re(B12 e^{-j(phi1 - phi2)}), attained
    when phi1 - phi2 = arg(B12); value B11 + B22 + 2|B12|.
    """
    b = np.asarray(b)
    if b.shape != (2, 2):
        raise ConfigurationError("closed form requires N = 2")
    b12 = b[0, 1]
    if b12 == 0:
        return np.ones(2, dtype=complex)
    return np.array([b12 / abs(b12), 1.0], dtype=complex)


def grid_search(b: np.ndarray, step_deg: float | None = None) -> tuple[np.ndarray, float]:
    """Exhaustive search over quantized relative phases (first phase fixed
    to 0). Returns (best vector, best quadratic form). Guarded to N <= 4."""
    b = np.asarray(b)
    n = b.shape[0]
    if n > _GRID_MAX_SENSORS:
        raise ConfigurationError(f"grid oracle limited to N <= {_GRID_MAX_SENSORS}")
    if step_deg is None:
        step_deg = 1.0 if n <= 3 else 4.0
    if n == 1:
        return np.ones(1, dtype=complex), float(np.real(b[0, 0]))

    steps = int(round(360.0 / step_deg))
    phi = 2.0 * np.pi * np.arange(steps) / steps
    grids = np.meshgrid(*([phi] * (n - 1)), indexing="ij", sparse=True)

    total = np.full(tuple(steps for _ in range(n - 1)), float(np.real(np.trace(b))))
    for i, k in itertools.combinations(range(n), 2):
        # a^H B a cross term: 2 Re(B_ik e^{j(phi_k - phi_i)}), phi_0 = 0
        pk = grids[k - 1] if k > 0 else 0.0
        pi_ = grids[i - 1] if i > 0 else 0.0
        delta = pk - pi_
        total = total + 2.0 * (
            np.real(b[i, k]) * np.cos(delta) - np.imag(b[i, k]) * np.sin(delta)
        )
    flat = int(np.argmax(total))
    idx = np.unravel_index(flat, total.shape)
    a = np.ones(n, dtype=complex)
    a[1:] = np.exp(1j * phi[list(idx)])
    return a, float(total[idx])


def optimize_phases(
    b: np.ndarray,
    strategy: PhaseStrategy,
    rng: RngStream,
) -> OptimizationReport:
    """Select a phase vector for Fisher matrix B under the given strategy."""
    b = np.asarray(b)
    n = b.shape[0]
    lower = variance_lower_bound(b, n)
    relaxation_value = None

    if strategy.kind == CLOSED_FORM_N2:
        a = optimize_phases_n2(b)
    elif strategy.kind == ALL_ONES:
        a = np.ones(n, dtype=complex)
    elif strategy.kind == GRID_ORACLE:
        a, _ = grid_search(b, strategy.grid_step_deg)
    else:  # SDP_RELAXATION
        problem = sdp.SdpProblem(objective=b)
        solution = sdp.solve(problem)
        relaxation_value = solution.objective_value
        a = sdp.extract_rank_one(solution, problem, rng, strategy.num_candidates)

    return OptimizationReport(
        phases=a,
        achieved_variance=estimator_variance(a, b),
        lower_bound=lower,
        relaxation_value=relaxation_value,
        strategy=strategy,
    )


def eigenvector_rounding(b: np.ndarray) -> np.ndarray:
    """Phase-normalized leading eigenvector of B; the convergence-failure
    fallback used by the experiment harness."""
    _, u = sla.eigh(np.asarray(b))
    return sdp.phase_normalize(u[:, -1])


def feedback_round(
    channel: ChannelRealization,
    scenario: Scenario,
    strategy: PhaseStrategy,
    rng: RngStream,
) -> OptimizationReport:
    """One ideal feedback cycle: FC computes B, optimizes a, sensors adopt it."""
    b = fisher_matrix(channel, scenario)
    return optimize_phases(b, strategy, rng)
