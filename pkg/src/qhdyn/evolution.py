"""Time integration: the standard-space propagator oracle and the twin
quasi-Hermitian Schrodinger equations.

In the friendly reference basis the Hermitized Hamiltonian is exactly
diagonal, so the standard-space propagator is a product of pure phases,

    u(t) = diag(exp(-i integral E_n(s) ds)),

with the integral done by composite Simpson over each step (diagonal matrices
commute, so time ordering is trivial).  That gives a closed-form-in-structure
oracle for the genuinely numerical side: classical RK4 applied to

    i d/dt |Phi>  = H_gen(t) |Phi>,
    i d/dt |Phi>> = H_gen'(t) |Phi>>,

one scheme driven by the same generator and its adjoint.  The left equation
is integrated independently; |Phi>> = Theta |Phi> is checked afterwards, not
built in.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dressing import DressingTrack, theta_inner
from .errors import ComplexSpectrumError, IntegrationError, ScenarioError
from .spectral import REALITY_TOL

PICTURES = ("right", "left", "standard")


@dataclass(frozen=True)
class EvolutionState:
    """One snapshot: right ket |Phi>, left ket |Phi>>, standard ket |phi>.

    Pictures that were not requested hold None.
    """

    t: float
    phi_right: np.ndarray | None
    phi_left: np.ndarray | None
    phi_standard: np.ndarray | None


@dataclass(frozen=True)
class PropagatorPair:
    """u(t) with its pulled-back right/left actions at one time."""

    t: float
    u_std: np.ndarray
    u_right: np.ndarray
    u_left_dag: np.ndarray


@dataclass(frozen=True)
class Trajectory:
    """States on the reporting grid plus the standard-space propagators."""

    times: np.ndarray
    states: tuple[EvolutionState, ...]
    u_series: tuple[np.ndarray, ...]
    pictures: tuple[str, ...]

    @property
    def initial(self) -> EvolutionState:
        return self.states[0]


def time_grid(t0: float, t1: float, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """(coarse, fine) uniform grids; fine has half the spacing.

    The step count must divide the interval exactly and be at least 2 (the
    4th-order derivative stencils need five fine samples).
    """
    if dt <= 0.0:
        raise ScenarioError(f"dt must be positive, got {dt}")
    span = t1 - t0
    if span <= 0.0:
        raise ScenarioError(f"need t1 > t0, got interval [{t0}, {t1}]")
    steps = int(round(span / dt))
    if steps < 2 or abs(steps * dt - span) > 1e-9 * max(1.0, abs(span)):
        raise ScenarioError(
            f"(t1 - t0)/dt = {span / dt:g} must be an integer number of steps >= 2"
        )
    fine = np.linspace(t0, t1, 2 * steps + 1)
    return fine[::2].copy(), fine


def standard_phases(track: DressingTrack) -> np.ndarray:
    """Accumulated phase integrals integral_{t0}^{t_k} E_n(s) ds at the coarse
    points, by composite Simpson over each (begin, midpoint, end) triple.

    Raises `ComplexSpectrumError` if any sampled E_n has left the real axis --
    the phases would stop being phases.
    """
    energies = track.energy_series()
    worst_im = float(np.max(np.abs(energies.imag)))
    if worst_im >= REALITY_TOL:
        raise ComplexSpectrumError(
            f"non-real energy |Im E| = {worst_im:.3e} encountered mid-run; "
            "the standard-space propagator is no longer unitary"
        )
    real = energies.real
    h = track.step  # fine spacing = dt/2
    n_coarse = (track.n_points - 1) // 2 + 1
    phases = np.zeros((n_coarse, real.shape[1]))
    for k in range(1, n_coarse):
        j = 2 * k
        simpson = (h / 3.0) * (real[j - 2] + 4.0 * real[j - 1] + real[j])
        phases[k] = phases[k - 1] + simpson
    return phases


def standard_propagators(track: DressingTrack) -> list[np.ndarray]:
    """u(t_k) = diag(exp(-i phase_n(t_k))) at every coarse grid point."""
    return [np.diag(np.exp(-1j * row)) for row in standard_phases(track)]


def propagate_standard(track: DressingTrack, t0: float | None = None, t1: float | None = None) -> np.ndarray:
    """Standard-space propagator u over [t0, t1] (defaults: the whole track).

    Both endpoints must be coarse grid points; diagonal propagators compose by
    phase subtraction.
    """
    phases = standard_phases(track)
    coarse = track.times[::2]
    i0 = 0 if t0 is None else _locate(coarse, t0)
    i1 = len(coarse) - 1 if t1 is None else _locate(coarse, t1)
    return np.diag(np.exp(-1j * (phases[i1] - phases[i0])))


def _locate(times: np.ndarray, t: float) -> int:
    idx = int(np.argmin(np.abs(times - t)))
    if abs(times[idx] - t) > 1e-9 * max(1.0, abs(t)):
        raise ScenarioError(f"time {t:g} is not a grid point of the track")
    return idx


def step_generator(
    state: EvolutionState,
    generators: Sequence[np.ndarray],
    dt: float,
) -> EvolutionState:
    """One classical RK4 step of the twin equations.

    ``generators`` holds H_gen at (t, t + dt/2, t + dt).  The right ket
    advances with H_gen, the left ket with its adjoint; the standard ket is
    not advanced here (it has its own closed-form propagator) and is carried
    through unchanged.
    """
    if dt <= 0.0:
        raise ScenarioError(f"dt must be positive, got {dt}")
    g0, gm, g1 = generators

    def advance(vec: np.ndarray, a0: np.ndarray, am: np.ndarray, a1: np.ndarray) -> np.ndarray:
        k1 = -1j * (a0 @ vec)
        k2 = -1j * (am @ (vec + 0.5 * dt * k1))
        k3 = -1j * (am @ (vec + 0.5 * dt * k2))
        k4 = -1j * (a1 @ (vec + dt * k3))
        new = vec + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(new)):
            raise IntegrationError(
                f"non-finite state components after the step at t={state.t:g} "
                "(exceptional-point crossing or metric blow-up upstream)"
            )
        return new

    phi_right = state.phi_right
    if phi_right is not None:
        phi_right = advance(phi_right, g0, gm, g1)
    phi_left = state.phi_left
    if phi_left is not None:
        phi_left = advance(phi_left, g0.conj().T, gm.conj().T, g1.conj().T)

    return EvolutionState(
        t=state.t + dt,
        phi_right=phi_right,
        phi_left=phi_left,
        phi_standard=state.phi_standard,
    )


def resolve_initial_state(spec, track: DressingTrack) -> np.ndarray:
    """Initial right ket from a vector, 'uniform', or ('eigenstate', k)."""
    n = track.dimension
    if isinstance(spec, str):
        if spec == "uniform":
            return np.ones(n, dtype=complex) / np.sqrt(n)
        raise ScenarioError(f"unknown initial-state preset {spec!r}")
    if isinstance(spec, tuple) and len(spec) == 2 and spec[0] == "eigenstate":
        k = int(spec[1])
        if not 0 <= k < n:
            raise ScenarioError(f"eigenstate index {k} out of range for N={n}")
        return track.frames[0].right_kets[:, k].copy()
    vec = np.asarray(spec, dtype=complex)
    if vec.shape != (n,):
        raise ScenarioError(f"initial state must have {n} components, got shape {vec.shape}")
    if not np.any(vec):
        raise ScenarioError("initial state is the zero vector")
    return vec.copy()


def propagate_quasi(
    track: DressingTrack,
    initial_state,
    pictures: Sequence[str] = PICTURES,
    use_plain_hamiltonian: bool = False,
) -> Trajectory:
    """Integrate the twin equations along the track's grid.

    The right and left kets advance by RK4 with the generator sampled at the
    step endpoints and midpoint (all fine grid points of the track); the
    standard ket follows the diagonal closed-form propagator.  With
    ``use_plain_hamiltonian`` the integrator is driven by H instead of H_gen
    -- the falsification switch: for a moving metric that run must lose the
    Theta-norm.
    """
    pictures = tuple(pictures)
    for p in pictures:
        if p not in PICTURES:
            raise ScenarioError(f"unknown picture {p!r}; expected a subset of {PICTURES}")
    if "right" not in pictures:
        raise ScenarioError("the 'right' picture is mandatory")

    if use_plain_hamiltonian:
        gens = list(track.hamiltonians)
    else:
        gens = [m.generator(H) for m, H in zip(track.maps, track.hamiltonians)]

    phi0 = resolve_initial_state(initial_state, track)
    want_left = "left" in pictures
    want_std = "standard" in pictures

    u_series = standard_propagators(track)
    phi_std0 = track.maps[0].omega @ phi0 if want_std else None
    phi_left0 = track.maps[0].theta @ phi0 if want_left else None

    coarse = track.times[::2]
    dt = float(coarse[1] - coarse[0])
    state = EvolutionState(
        t=float(coarse[0]),
        phi_right=phi0,
        phi_left=phi_left0,
        phi_standard=phi_std0,
    )
    states = [state]
    for k in range(len(coarse) - 1):
        j = 2 * k
        state = step_generator(state, (gens[j], gens[j + 1], gens[j + 2]), dt)
        if want_std:
            state = EvolutionState(
                t=state.t,
                phi_right=state.phi_right,
                phi_left=state.phi_left,
                phi_standard=u_series[k + 1] @ phi_std0,
            )
        states.append(state)

    return Trajectory(
        times=coarse,
        states=tuple(states),
        u_series=tuple(u_series),
        pictures=pictures,
    )


def propagator_pair(track: DressingTrack, coarse_index: int, u: np.ndarray) -> PropagatorPair:
    """Right/left pulled-back propagators at one coarse grid point."""
    here = track.maps[2 * coarse_index]
    start = track.maps[0]
    return PropagatorPair(
        t=float(track.times[2 * coarse_index]),
        u_std=u,
        u_right=here.omega_inv @ u @ start.omega,
        u_left_dag=here.omega.conj().T @ u @ start.omega_inv.conj().T,
    )


def expectation(state: EvolutionState, A: np.ndarray, theta: np.ndarray) -> complex:
    """Metric mean value <Phi|Theta A|Phi> / <Phi|Theta|Phi>."""
    phi = state.phi_right
    norm = theta_inner(phi, phi, theta)
    if abs(norm) < 1e-300:
        raise ValueError("zero Theta-norm state has no expectation values")
    return theta_inner(phi, A @ phi, theta) / norm
