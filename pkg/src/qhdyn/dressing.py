"""Dressing maps, metrics, and the corrected evolution generator.

Given a biorthogonal frame of H(t) and nonzero coefficients mu_n(t), the
dressing map is assembled row-wise as Omega = sum_n e_n mu_n <<n| (the
reference basis |n> of the friendly space is fixed to the canonical basis, so
Omega H Omega^-1 is exactly diagonal).  The metric Theta = Omega' Omega turns
H into a Hermitian operator of the Theta-inner-product space, and the
operator that actually moves kets in time is

    H_gen(t) = H(t) - i Omega^-1(t) dOmega/dt.

Two routes produce dOmega/dt: exact differentiation of the mu schedules when
H is static (frames constant), or 4th-order finite differences applied to the
continuity-tracked Omega(t) samples when H itself moves.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConditioningError, ConditioningWarning, MetricPositivityError, ScenarioError
from .model import HamiltonianModel, build_hamiltonian
from .schedules import ScheduleSpec, eval_schedule, eval_schedule_derivative
from .spectral import BiorthogonalFrame, eig_biorthogonal, track_continuity

OMEGA_DOT_MODES = ("auto", "analytic-mu-only", "finite-difference")

# metric conditioning guard: warn above the first bound, abort above the second
THETA_COND_WARN = 1e8
THETA_COND_ABORT = 1e12


@dataclass(frozen=True)
class DressingMap:
    """Omega(t), its inverse and derivative, and the metric Theta(t).

    theta_source records the provenance of omega_dot: 'analytic' (exact mu
    differentiation, static frames) or 'finite-difference' (stencils over
    tracked samples).
    """

    t: float
    omega: np.ndarray
    omega_inv: np.ndarray
    omega_dot: np.ndarray
    theta: np.ndarray
    theta_source: str

    def generator(self, hamiltonian: np.ndarray) -> np.ndarray:
        return build_generator(hamiltonian, self.omega, self.omega_dot, self.omega_inv)


def build_omega(frame: BiorthogonalFrame, mu: Sequence[complex]) -> np.ndarray:
    """Omega = sum_n e_n mu_n <<n|: row n is mu_n times the left bra."""
    mu = np.asarray(mu, dtype=complex)
    if mu.shape != (frame.dimension,):
        raise ScenarioError(f"need {frame.dimension} mu coefficients, got shape {mu.shape}")
    if np.any(mu == 0):
        raise ScenarioError("mu coefficients must be nonzero")
    return mu[:, None] * frame.left_bras


def omega_inverse(frame: BiorthogonalFrame, mu: Sequence[complex]) -> np.ndarray:
    """Frame-exact inverse: column n is |n> / mu_n (uses <<m|n> = delta_mn)."""
    mu = np.asarray(mu, dtype=complex)
    if np.any(mu == 0):
        raise ScenarioError("mu coefficients must be nonzero")
    return frame.right_kets / mu[None, :]


def build_theta(omega: np.ndarray) -> np.ndarray:
    """Metric Theta = Omega' Omega; Hermitian positive definite by construction."""
    theta = omega.conj().T @ omega
    theta = 0.5 * (theta + theta.conj().T)
    smallest = float(np.linalg.eigvalsh(theta)[0])
    if smallest <= 0.0:
        raise MetricPositivityError(
            f"metric lost positive definiteness (min eigenvalue {smallest:.3e}); "
            "the dressing map upstream is broken"
        )
    return theta


def theta_spectral(frame: BiorthogonalFrame, mu: Sequence[complex]) -> np.ndarray:
    """Independent metric assembly sum_n |mu_n|^2 (<<n|)' <<n|.

    Kept as a cross-check against `build_theta`; the two routes must agree to
    rounding for any valid frame.
    """
    mu = np.asarray(mu, dtype=complex)
    theta = np.zeros((frame.dimension, frame.dimension), dtype=complex)
    for k in range(frame.dimension):
        bra = frame.left_bras[k]
        theta += (abs(mu[k]) ** 2) * np.outer(bra.conj(), bra)
    return theta


def hermitize(omega: np.ndarray, H: np.ndarray, omega_inv: np.ndarray | None = None) -> np.ndarray:
    """h = Omega H Omega^-1, the Hermitian partner acting in the friendly space."""
    if omega_inv is None:
        # solve X Omega = Omega H instead of forming the inverse
        return np.linalg.solve(omega.T, (omega @ H).T).T
    return omega @ H @ omega_inv


def quasi_hermiticity_residual(A: np.ndarray, theta: np.ndarray) -> float:
    """max-norm of A' Theta - Theta A; zero certifies A as a Theta-observable."""
    return float(np.max(np.abs(A.conj().T @ theta - theta @ A)))


def build_generator(
    H: np.ndarray,
    omega: np.ndarray,
    omega_dot: np.ndarray,
    omega_inv: np.ndarray | None = None,
) -> np.ndarray:
    """H_gen = H - i Omega^-1 dOmega/dt."""
    if omega_inv is None:
        correction = np.linalg.solve(omega, omega_dot)
    else:
        correction = omega_inv @ omega_dot
    return H - 1j * correction


def theta_inner(a: np.ndarray, b: np.ndarray, theta: np.ndarray) -> complex:
    """Metric inner product <a|Theta|b>."""
    return complex(np.vdot(a, theta @ b))


def theta_norm(a: np.ndarray, theta: np.ndarray) -> float:
    """Real quadratic form <a|Theta|a> (positive for nonzero a)."""
    return theta_inner(a, a, theta).real


def metric_conditioning(theta: np.ndarray) -> tuple[float, float]:
    """(smallest eigenvalue, condition number) of the Hermitian metric."""
    eigs = np.linalg.eigvalsh(theta)
    smallest = float(eigs[0])
    largest = float(eigs[-1])
    if smallest <= 0.0:
        return smallest, np.inf
    return smallest, largest / smallest


def _guard_conditioning(theta: np.ndarray, t: float) -> tuple[float, float]:
    smallest, cond = metric_conditioning(theta)
    if cond > THETA_COND_ABORT:
        raise ConditioningError(
            f"cond(Theta) = {cond:.3e} > {THETA_COND_ABORT:.0e} at t={t:g}; "
            "metric-norm checks are no longer meaningful"
        )
    if cond > THETA_COND_WARN:
        warnings.warn(
            f"cond(Theta) = {cond:.3e} exceeds {THETA_COND_WARN:.0e}; "
            "residual checks lose accuracy",
            ConditioningWarning,
            stacklevel=2,
        )
    return smallest, cond


def mu_values(schedules: Sequence[ScheduleSpec], t: float) -> np.ndarray:
    return np.array([eval_schedule(s, t) for s in schedules], dtype=complex)


def mu_derivatives(schedules: Sequence[ScheduleSpec], t: float) -> np.ndarray:
    return np.array([eval_schedule_derivative(s, t) for s in schedules], dtype=complex)


# 4th-order first-derivative stencils on a uniform grid, in units of 1/(12 h).
# Rows: offset-0 (forward), offset-1, centered, offset -1 / -0 mirrored.
_FORWARD_0 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0])
_FORWARD_1 = np.array([-3.0, -10.0, 18.0, -6.0, 1.0])
_CENTRAL = np.array([1.0, -8.0, 0.0, 8.0, -1.0])


def differentiate_samples(samples: Sequence[np.ndarray], step: float) -> list[np.ndarray]:
    """4th-order finite-difference time derivative of a matrix-valued sample
    sequence on a uniform grid; one-sided stencils at the two points nearest
    each boundary."""
    m = len(samples)
    if m < 5:
        raise ScenarioError(f"need at least 5 samples for 4th-order differences, got {m}")
    scale = 1.0 / (12.0 * step)
    out = []
    for j in range(m):
        if j == 0:
            window, coeff = samples[0:5], _FORWARD_0
        elif j == 1:
            window, coeff = samples[0:5], _FORWARD_1
        elif j == m - 2:
            window, coeff = samples[m - 5 : m], -_FORWARD_1[::-1]
        elif j == m - 1:
            window, coeff = samples[m - 5 : m], -_FORWARD_0[::-1]
        else:
            window, coeff = samples[j - 2 : j + 3], _CENTRAL
        out.append(scale * sum(c * w for c, w in zip(coeff, window)))
    return out


@dataclass(frozen=True)
class DressingTrack:
    """Frames and dressing maps sampled on a uniform grid.

    The grid is the integrator's fine grid (spacing = half the reporting
    step), so every Runge-Kutta substep time is a sample.  Coarse reporting
    points sit at the even indices.
    """

    times: np.ndarray
    hamiltonians: tuple[np.ndarray, ...]
    frames: tuple[BiorthogonalFrame, ...]
    mu: np.ndarray
    maps: tuple[DressingMap, ...]

    @property
    def n_points(self) -> int:
        return len(self.times)

    @property
    def dimension(self) -> int:
        return self.frames[0].dimension

    @property
    def step(self) -> float:
        return float(self.times[1] - self.times[0])

    def energy_series(self) -> np.ndarray:
        """(n_points, N) eigenvalue samples, continuity-ordered."""
        return np.array([f.energies for f in self.frames])

    def coarse_indices(self) -> range:
        return range(0, self.n_points, 2)


def omega_dot_series(
    model: HamiltonianModel,
    frames: Sequence[BiorthogonalFrame],
    mu_schedules: Sequence[ScheduleSpec],
    times: np.ndarray,
    mode: str,
) -> tuple[list[np.ndarray], str]:
    """dOmega/dt at every grid time, by the requested route.

    'analytic-mu-only' differentiates the mu schedules exactly and reuses the
    (necessarily constant) left bras; it is rejected when H carries a genuine
    time dependence.  'finite-difference' applies 4th-order stencils to the
    tracked Omega samples.  'auto' picks analytic when H is static.
    """
    if mode not in OMEGA_DOT_MODES:
        raise ScenarioError(f"unknown omega_dot mode {mode!r}; expected one of {OMEGA_DOT_MODES}")
    if mode == "auto":
        mode = "finite-difference" if model.is_time_dependent else "analytic-mu-only"
    if mode == "analytic-mu-only":
        if model.is_time_dependent:
            raise ScenarioError(
                "omega_dot mode 'analytic-mu-only' is inconsistent with a "
                "time-dependent Hamiltonian schedule"
            )
        dots = [
            mu_derivatives(mu_schedules, t)[:, None] * frame.left_bras
            for t, frame in zip(times, frames)
        ]
        return dots, "analytic"
    omegas = [
        build_omega(frame, mu_values(mu_schedules, t)) for t, frame in zip(times, frames)
    ]
    step = float(times[1] - times[0])
    return differentiate_samples(omegas, step), "finite-difference"


def build_dressing_track(
    model: HamiltonianModel,
    mu_schedules: Sequence[ScheduleSpec],
    times: np.ndarray,
    omega_dot_mode: str = "auto",
    reality_policy: str = "assert",
) -> DressingTrack:
    """Assemble frames and dressing maps along a uniform time grid.

    Frames are re-solved at every grid point and continuity-tracked
    sequentially; the dressing then follows the tracked gauge, so the sampled
    Omega(t) lies on one smooth curve and finite differences of it are
    meaningful.
    """
    times = np.asarray(times, dtype=float)
    if len(mu_schedules) != model.dimension:
        raise ScenarioError(
            f"need {model.dimension} mu schedules, got {len(mu_schedules)}"
        )

    hams: list[np.ndarray] = []
    frames: list[BiorthogonalFrame] = []
    prev: BiorthogonalFrame | None = None
    for t in times:
        H = build_hamiltonian(model, float(t))
        frame = eig_biorthogonal(H, reality_policy=reality_policy, t=float(t))
        if prev is not None:
            frame = track_continuity(prev, frame)
        hams.append(H)
        frames.append(frame)
        prev = frame

    mus = np.array([mu_values(mu_schedules, t) for t in times])
    dots, source = omega_dot_series(model, frames, mu_schedules, times, omega_dot_mode)

    maps: list[DressingMap] = []
    for k, t in enumerate(times):
        omega = build_omega(frames[k], mus[k])
        inv = omega_inverse(frames[k], mus[k])
        theta = build_theta(omega)
        _guard_conditioning(theta, float(t))
        maps.append(
            DressingMap(
                t=float(t),
                omega=omega,
                omega_inv=inv,
                omega_dot=dots[k],
                theta=theta,
                theta_source=source,
            )
        )

    return DressingTrack(
        times=times,
        hamiltonians=tuple(hams),
        frames=tuple(frames),
        mu=mus,
        maps=tuple(maps),
    )
