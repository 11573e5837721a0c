# phasefuse/sdp.py
"""Unit-diagonal semidefinite relaxation of the phase selection problem.

Solves   max tr(B A)  s.t.  A_{ii} = 1, A >= 0  (A complex Hermitian)

with a feasible-start primal-dual interior-point method using
Nesterov-Todd scaling. The dual is  min e^T y  s.t.  Diag(y) - B >= 0, so
with an exactly feasible start (A = I, y = (lambda_max(B)+1) e) both
residuals are zero throughout and the duality gap <A, Z> is the only
quantity driven to zero.

The diagonal constraint structure makes the Schur complement of the Newton
system simply the elementwise squared modulus of the scaling matrix W,
so each iteration costs a handful of dense N x N eigendecompositions.

``embed_real`` provides the equivalent real-valued formulation
(tr(B_r A_r - B_i A_i) with the 2N x 2N block PSD constraint); the solver
works in the complex Hermitian space directly, which is bit-equivalent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import ConfigurationError, ConvergenceError
from .rng import RngStream

HERMITIAN_TOL = 1e-12
DEFAULT_GAP_TOL = 1e-9  # relative; well inside the 1e-7 certificate requirement
DEFAULT_MAX_ITER = 200
EIG_CLIP_REL = 1e-12
STEP_FRACTION = 0.98


@dataclass(frozen=True)
class SdpProblem:
    """Hermitian objective B of the relaxation max tr(B A)."""

    objective: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.objective, dtype=complex)
        if b.ndim != 2 or b.shape[0] != b.shape[1]:
            raise ConfigurationError("objective must be a square matrix")
        scale = max(1.0, float(np.abs(b).max()))
        if np.abs(b - b.conj().T).max() > HERMITIAN_TOL * scale:
            raise ConfigurationError("objective must be Hermitian")
        object.__setattr__(self, "objective", 0.5 * (b + b.conj().T))

    @property
    def dimension(self) -> int:
        return self.objective.shape[0]


@dataclass
class SdpSolution:
    """Relaxed optimum with feasibility and optimality certificates."""

    gram: np.ndarray          # A*, N x N Hermitian PSD, unit diagonal
    objective_value: float    # tr(B A*)
    duality_gap: float        # e^T y - tr(B A*) = <A*, Z> >= 0
    diag_residual: float      # max_i |A*_{ii} - 1|
    min_eigenvalue: float     # smallest eigenvalue of A*
    iterations: int


@dataclass(frozen=True)
class RealEmbedding:
    """Real form of the complex SDP: objective tr(B_r A_r - B_i A_i)."""

    obj_r: np.ndarray  # real part of B, symmetric
    obj_i: np.ndarray  # imaginary part of B, antisymmetric

    def block(self, a_r: np.ndarray, a_i: np.ndarray) -> np.ndarray:
        """The 2N x 2N PSD-constrained block [[A_r, -A_i], [A_i, A_r]]."""
        return np.block([[a_r, -a_i], [a_i, a_r]])

    def objective_value(self, a_r: np.ndarray, a_i: np.ndarray) -> float:
        return float(np.trace(self.obj_r @ a_r - self.obj_i @ a_i))


def embed_real(problem: SdpProblem) -> RealEmbedding:
    """Split B into its real/imaginary parts for the equivalent real SDP."""
    b = problem.objective
    return RealEmbedding(obj_r=np.real(b).copy(), obj_i=np.imag(b).copy())


def _herm(x: np.ndarray) -> np.ndarray:
    return 0.5 * (x + x.conj().T)


def _nt_scaling(x: np.ndarray, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nesterov-Todd scaling point W with W Z W = X, plus Z^{-1}.

    W = Z^{-1/2} (Z^{1/2} X Z^{1/2})^{1/2} Z^{-1/2}.
    """
    wz, qz = sla.eigh(z)
    wz = np.maximum(wz, np.finfo(float).tiny)
    z_half = (qz * np.sqrt(wz)) @ qz.conj().T
    z_ihalf = (qz * (1.0 / np.sqrt(wz))) @ qz.conj().T
    z_inv = (qz * (1.0 / wz)) @ qz.conj().T
    s = _herm(z_half @ x @ z_half)
    ws, qs = sla.eigh(s)
    ws = np.maximum(ws, np.finfo(float).tiny)
    s_half = (qs * np.sqrt(ws)) @ qs.conj().T
    w = _herm(z_ihalf @ s_half @ z_ihalf)
    return w, z_inv


def _max_step(x: np.ndarray, dx: np.ndarray) -> float:
    """Largest alpha with X + alpha dX >= 0, for Hermitian PD X."""
    lo = sla.cholesky(x, lower=True)
    m = sla.solve_triangular(lo, dx, lower=True)
    m = sla.solve_triangular(lo, m.conj().T, lower=True).conj().T
    lam_min = float(np.min(sla.eigvalsh(_herm(m))))
    if lam_min >= -np.finfo(float).eps:
        return np.inf
    return -1.0 / lam_min


def solve(
    problem: SdpProblem,
    gap_tol: float = DEFAULT_GAP_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> SdpSolution:
    """Solve the unit-diagonal SDP relaxation to the requested duality gap.

    Raises ConvergenceError (carrying the best iterate) if the gap has not
    reached 1e-7 relative within ``max_iter`` iterations.
    """
    b = problem.objective
    n = problem.dimension
    ones = np.ones(n)

    if n == 1:
        val = float(np.real(b[0, 0]))
        return SdpSolution(
            gram=np.ones((1, 1), dtype=complex),
            objective_value=val,
            duality_gap=0.0,
            diag_residual=0.0,
            min_eigenvalue=1.0,
            iterations=0,
        )

    lam_max = float(np.max(sla.eigvalsh(b)))
    scale = max(1.0, abs(lam_max))

    x = np.eye(n, dtype=complex)
    y = (lam_max + scale) * ones.copy()
    z = _herm(np.diag(y).astype(complex) - b)

    iterations = 0
    gap = float(np.real(np.trace(x @ z)))
    for iterations in range(1, max_iter + 1):
        obj = float(np.real(np.trace(b @ x)))
        if gap <= gap_tol * max(1.0, abs(obj)):
            iterations -= 1
            break

        mu = gap / n
        w, z_inv = _nt_scaling(x, z)
        schur = np.real(w * w.conj())  # (|W_ij|^2), symmetric PD
        cf = sla.cho_factor(schur, lower=True)
        diag_zinv = np.real(np.diag(z_inv))

        def direction(sigma_mu: float):
            dy = sla.cho_solve(cf, ones - sigma_mu * diag_zinv)
            dz = -np.diag(dy).astype(complex)
            dx = _herm(sigma_mu * z_inv - x + (w * dy[np.newaxis, :]) @ w)
            return dx, dy, dz

        # Predictor (affine direction) fixes the centering parameter.
        dx_a, _, dz_a = direction(0.0)
        ap = min(1.0, STEP_FRACTION * _max_step(x, dx_a))
        ad = min(1.0, STEP_FRACTION * _max_step(z, dz_a))
        gap_aff = float(np.real(np.trace((x + ap * dx_a) @ (z + ad * dz_a))))
        sigma = min(1.0, max((max(gap_aff, 0.0) / gap) ** 3, 1e-6))

        dx, dy, dz = direction(sigma * mu)
        ap = min(1.0, STEP_FRACTION * _max_step(x, dx))
        ad = min(1.0, STEP_FRACTION * _max_step(z, dz))

        x = _herm(x + ap * dx)
        y = y + ad * dy
        z = _herm(z + ad * dz)
        gap = float(np.real(np.trace(x @ z)))

    obj = float(np.real(np.trace(b @ x)))
    sol = SdpSolution(
        gram=x,
        objective_value=obj,
        duality_gap=max(gap, 0.0),
        diag_residual=float(np.max(np.abs(np.real(np.diag(x)) - 1.0))),
        min_eigenvalue=float(np.min(sla.eigvalsh(x))),
        iterations=iterations,
    )
    if sol.duality_gap > 1e-7 * max(1.0, abs(obj)):
        raise ConvergenceError(
            f"duality gap {sol.duality_gap:.3e} after {iterations} iterations",
            best_solution=sol,
        )
    return sol


def phase_normalize(c: np.ndarray) -> np.ndarray:
    """Project a complex vector onto the unit-modulus torus (zeros map to 1)."""
    out = np.ones_like(c, dtype=complex)
    nz = np.abs(c) > 0
    out[nz] = c[nz] / np.abs(c[nz])
    return out


def extract_rank_one(
    solution: SdpSolution,
    problem: SdpProblem,
    rng: RngStream,
    num_candidates: int = 100,
) -> np.ndarray:
    """Round the relaxed Gram matrix A* to a unit-modulus vector.

    Factor A* = C^H C via eigendecomposition (negative eigenvalues clipped),
    draw random unit-modulus vectors r and phase-normalize C^H r. The leading
    eigenvector of A* and the all-ones vector are always in the candidate
    pool; the candidate with the largest a^H B a wins (first encountered on
    ties), so the result never underperforms the no-feedback baseline.
    """
    b = problem.objective
    n = problem.dimension
    w, u = sla.eigh(solution.gram)
    w = np.where(w < EIG_CLIP_REL * max(w[-1], 0.0), 0.0, w)

    gen = rng.generator()
    candidates = [phase_normalize(u[:, -1]), np.ones(n, dtype=complex)]
    if num_candidates > 0:
        thetas = gen.uniform(0.0, 2.0 * np.pi, size=(num_candidates, n))
        r = np.exp(1j * thetas)  # rows are random unit-modulus vectors
        # C^H r^T with C = diag(sqrt(w)) U^H  =>  U (sqrt(w) * r_k)
        mixed = (u * np.sqrt(w)[np.newaxis, :]) @ r.T  # (n, num_candidates)
        candidates.extend(phase_normalize(mixed[:, k]) for k in range(num_candidates))

    pool = np.column_stack(candidates)  # (n, K)
    vals = np.real(np.einsum("ik,ij,jk->k", pool.conj(), b, pool))
    best = int(np.argmax(vals))
    return pool[:, best]
