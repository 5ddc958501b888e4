"""Named invariant checks with measured residuals.

Each check condenses one structural identity of the dressed dynamics into a
max-norm residual over the run and compares it against a threshold.  The
defaults target desk scale (N <= 8, dt = 1e-3, T <= 1) and every threshold
can be overridden per scenario.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .dressing import DressingTrack, hermitize, quasi_hermiticity_residual, theta_norm
from .errors import ScenarioError
from .evolution import Trajectory, expectation, propagator_pair

DEFAULT_THRESHOLDS = {
    "theta-norm-conservation": 1e-8,
    "left-right-duality": 1e-8,
    "state-consistency": 1e-7,
    "equivalence": 1e-7,
    "standard-unitarity": 1e-10,
    "propagator-intertwining": 1e-7,
    "quasi-hermiticity": 1e-9,
    "isospectrality": 1e-9,
    "observable-reality": 1e-9,
}

CHECK_NAMES = tuple(DEFAULT_THRESHOLDS)


@dataclass(frozen=True)
class InvariantReport:
    name: str
    max_residual: float
    threshold: float
    passed: bool
    per_time_series: tuple[tuple[float, float], ...] | None = None

    @classmethod
    def from_series(cls, name, times, residuals, threshold):
        residuals = [float(r) for r in residuals]
        worst = max(residuals) if residuals else 0.0
        return cls(
            name=name,
            max_residual=worst,
            threshold=float(threshold),
            passed=worst < threshold,
            per_time_series=tuple(zip((float(t) for t in times), residuals)),
        )


def check_norm_conservation(trajectory: Trajectory, track: DressingTrack, threshold=None) -> InvariantReport:
    """Drift of the metric norm <Phi(t)|Theta(t)|Phi(t)> along the run."""
    threshold = DEFAULT_THRESHOLDS["theta-norm-conservation"] if threshold is None else threshold
    norms = [
        theta_norm(state.phi_right, track.maps[2 * k].theta)
        for k, state in enumerate(trajectory.states)
    ]
    residuals = [abs(v - norms[0]) for v in norms]
    return InvariantReport.from_series("theta-norm-conservation", trajectory.times, residuals, threshold)


def check_left_right_duality(trajectory: Trajectory, threshold=None) -> InvariantReport:
    """Drift of <<Phi(t)|Phi(t)> built from the independently integrated left ket."""
    threshold = DEFAULT_THRESHOLDS["left-right-duality"] if threshold is None else threshold
    _require_picture(trajectory, "left")
    vals = [complex(np.vdot(s.phi_left, s.phi_right)) for s in trajectory.states]
    residuals = [abs(v - vals[0]) for v in vals]
    return InvariantReport.from_series("left-right-duality", trajectory.times, residuals, threshold)


def check_state_consistency(trajectory: Trajectory, track: DressingTrack, threshold=None) -> InvariantReport:
    """||Phi(t)>> - Theta(t)|Phi(t)>|| -- the left ket is a check, not a construction."""
    threshold = DEFAULT_THRESHOLDS["state-consistency"] if threshold is None else threshold
    _require_picture(trajectory, "left")
    residuals = [
        float(np.linalg.norm(s.phi_left - track.maps[2 * k].theta @ s.phi_right))
        for k, s in enumerate(trajectory.states)
    ]
    return InvariantReport.from_series("state-consistency", trajectory.times, residuals, threshold)


def check_equivalence(
    trajectory: Trajectory,
    track: DressingTrack,
    u_series: Sequence[np.ndarray] | None = None,
    threshold=None,
) -> InvariantReport:
    """Relative distance of the integrated right ket from the oracle path
    Omega^-1(t) u(t) Omega(0) Phi(0)."""
    threshold = DEFAULT_THRESHOLDS["equivalence"] if threshold is None else threshold
    if u_series is None:
        u_series = trajectory.u_series
    phi0 = trajectory.initial.phi_right
    scale = float(np.linalg.norm(phi0))
    seed = track.maps[0].omega @ phi0
    residuals = []
    for k, state in enumerate(trajectory.states):
        oracle = track.maps[2 * k].omega_inv @ (u_series[k] @ seed)
        residuals.append(float(np.linalg.norm(state.phi_right - oracle)) / scale)
    return InvariantReport.from_series("equivalence", trajectory.times, residuals, threshold)


def check_standard_unitarity(
    u_series: Sequence[np.ndarray],
    times: Sequence[float] | None = None,
    threshold=None,
) -> InvariantReport:
    """max ||u' u - I|| over the standard-space propagator series."""
    threshold = DEFAULT_THRESHOLDS["standard-unitarity"] if threshold is None else threshold
    if times is None:
        times = range(len(u_series))
    eye = np.eye(u_series[0].shape[0])
    residuals = [float(np.max(np.abs(u.conj().T @ u - eye))) for u in u_series]
    return InvariantReport.from_series("standard-unitarity", times, residuals, threshold)


def check_propagator_intertwining(
    trajectory: Trajectory, track: DressingTrack, threshold=None
) -> InvariantReport:
    """U_L(t) U_R(t) = I -- the product whose collapse conserves the metric norm."""
    threshold = DEFAULT_THRESHOLDS["propagator-intertwining"] if threshold is None else threshold
    eye = np.eye(track.dimension)
    residuals = []
    for k in range(len(trajectory.states)):
        pair = propagator_pair(track, k, trajectory.u_series[k])
        u_left = pair.u_left_dag.conj().T
        residuals.append(float(np.max(np.abs(u_left @ pair.u_right - eye))))
    return InvariantReport.from_series("propagator-intertwining", trajectory.times, residuals, threshold)


def check_quasi_hermiticity(track: DressingTrack, threshold=None) -> InvariantReport:
    """||H' Theta - Theta H|| at every grid point of the track."""
    threshold = DEFAULT_THRESHOLDS["quasi-hermiticity"] if threshold is None else threshold
    residuals = [
        quasi_hermiticity_residual(H, m.theta)
        for H, m in zip(track.hamiltonians, track.maps)
    ]
    return InvariantReport.from_series("quasi-hermiticity", track.times, residuals, threshold)


def check_isospectrality(track: DressingTrack, threshold=None) -> InvariantReport:
    """Spectra of h = Omega H Omega^-1 and H agree (fresh eigensolves of both)."""
    threshold = DEFAULT_THRESHOLDS["isospectrality"] if threshold is None else threshold
    residuals = []
    for H, m in zip(track.hamiltonians, track.maps):
        h = hermitize(m.omega, H, m.omega_inv)
        spec_h = _lexsorted(np.linalg.eigvals(h))
        spec_big = _lexsorted(np.linalg.eigvals(H))
        residuals.append(float(np.max(np.abs(spec_h - spec_big))))
    return InvariantReport.from_series("isospectrality", track.times, residuals, threshold)


def check_observable_reality(
    trajectory: Trajectory,
    observable_series: Mapping[str, Sequence[np.ndarray]],
    track: DressingTrack,
    threshold=None,
    residual_threshold=None,
) -> InvariantReport:
    """Imaginary part of every declared observable's mean value along the run.

    Each observable must first pass the quasi-Hermiticity residual gate at
    every reporting point; a failed gate fails the check outright (the mean
    value of an illegitimate observable has no reality claim).
    """
    threshold = DEFAULT_THRESHOLDS["observable-reality"] if threshold is None else threshold
    residual_threshold = (
        DEFAULT_THRESHOLDS["quasi-hermiticity"] if residual_threshold is None else residual_threshold
    )
    residuals = []
    for k, state in enumerate(trajectory.states):
        theta = track.maps[2 * k].theta
        worst = 0.0
        for name, series in observable_series.items():
            a = series[k]
            gate = quasi_hermiticity_residual(a, theta)
            if gate > residual_threshold:
                # not a Theta-observable here; report the violation itself
                worst = max(worst, gate)
                continue
            worst = max(worst, abs(expectation(state, a, theta).imag))
        residuals.append(worst)
    return InvariantReport.from_series("observable-reality", trajectory.times, residuals, threshold)


def run_standard_checks(
    trajectory: Trajectory,
    track: DressingTrack,
    observable_series: Mapping[str, Sequence[np.ndarray]] | None = None,
    selection: Sequence[str] | None = None,
    overrides: Mapping[str, float] | None = None,
) -> list[InvariantReport]:
    """Run the named checks (all by default) with optional threshold overrides.

    Checks that need the left picture are skipped automatically when it was
    not integrated, unless explicitly selected.
    """
    overrides = dict(overrides or {})
    for name in overrides:
        if name not in DEFAULT_THRESHOLDS:
            raise ScenarioError(f"unknown check name {name!r}")
    explicit = selection is not None
    if selection is None:
        selection = list(CHECK_NAMES)
        if "left" not in trajectory.pictures:
            selection = [s for s in selection if s not in ("left-right-duality", "state-consistency")]
        if observable_series is None:
            selection = [s for s in selection if s != "observable-reality"]
    for name in selection:
        if name not in DEFAULT_THRESHOLDS:
            raise ScenarioError(f"unknown check name {name!r}")

    def thr(name):
        return overrides.get(name, DEFAULT_THRESHOLDS[name])

    reports = []
    for name in selection:
        if name == "theta-norm-conservation":
            reports.append(check_norm_conservation(trajectory, track, thr(name)))
        elif name == "left-right-duality":
            reports.append(check_left_right_duality(trajectory, thr(name)))
        elif name == "state-consistency":
            reports.append(check_state_consistency(trajectory, track, thr(name)))
        elif name == "equivalence":
            reports.append(check_equivalence(trajectory, track, threshold=thr(name)))
        elif name == "standard-unitarity":
            reports.append(check_standard_unitarity(trajectory.u_series, trajectory.times, thr(name)))
        elif name == "propagator-intertwining":
            reports.append(check_propagator_intertwining(trajectory, track, thr(name)))
        elif name == "quasi-hermiticity":
            reports.append(check_quasi_hermiticity(track, thr(name)))
        elif name == "isospectrality":
            reports.append(check_isospectrality(track, thr(name)))
        elif name == "observable-reality":
            if observable_series is None:
                if explicit:
                    raise ScenarioError("observable-reality requested but no observables declared")
                continue
            reports.append(check_observable_reality(trajectory, observable_series, track, thr(name)))
    return reports


def _require_picture(trajectory: Trajectory, picture: str):
    if picture not in trajectory.pictures:
        raise ScenarioError(f"check needs the {picture!r} picture, which was not integrated")


def _lexsorted(values: np.ndarray) -> np.ndarray:
    return values[np.lexsort((values.imag, values.real))]
