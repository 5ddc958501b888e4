"""Built-in Hamiltonian families, observables, and their time dependence.

Four families are provided:

``triangular2``
    [[e1, c(t)], [0, e2]] -- upper triangular, eigenvalues {e1, e2} for any c.
``pt2``
    [[i*gamma(t), s], [s, -i*gamma(t)]] -- parity-time symmetric two-level
    matrix; spectrum +-sqrt(s^2 - gamma^2) is real while |gamma| < s and
    coalesces at |gamma| = s.
``similarity-rand``
    S diag(E_1..E_N) S^-1 with a fixed seeded invertible S (condition number
    kept below 1e3 by resampling) and a prescribed real diagonal.
``cubic-trunc``
    N x N truncation of p^2 + i g x^3 in the harmonic-oscillator basis
    (omega = 1 convention, x = (a + a')/sqrt(2), p = i(a' - a)/sqrt(2)).
    Matrix elements are the exact infinite-basis ones restricted to the
    first N levels; spectral reality of the truncation is reported by the
    eigensolver at run time, never assumed.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import ScenarioError
from .schedules import ScheduleSpec, eval_schedule, eval_schedule_derivative

FAMILIES = ("triangular2", "pt2", "similarity-rand", "cubic-trunc")

OBSERVABLE_SOURCES = ("hamiltonian-itself", "user-matrix", "function-of-frame")

# resampling bound for the random similarity transform
_MAX_SIMILARITY_COND = 1e3

# tolerance for parameters that must be real-valued
_REAL_PARAM_TOL = 1e-12


@dataclass(frozen=True)
class ObservableSpec:
    """A declared observable A_j(t).

    source selects the construction:
      hamiltonian-itself   A(t) = H(t)
      user-matrix          A(t) = data (fixed complex N x N matrix)
      function-of-frame    A(t) = Omega^-1(t) . data . Omega(t) with a
                           Hermitian seed ``data`` (quasi-Hermitian w.r.t.
                           Theta(t) by construction)
    """

    name: str
    source: str
    data: np.ndarray | None = None

    def __post_init__(self):
        if self.source not in OBSERVABLE_SOURCES:
            raise ScenarioError(
                f"observable {self.name!r}: unknown source {self.source!r}; "
                f"expected one of {OBSERVABLE_SOURCES}"
            )
        if self.source == "hamiltonian-itself":
            return
        if self.data is None:
            raise ScenarioError(f"observable {self.name!r}: source {self.source!r} needs a matrix")
        data = np.asarray(self.data, dtype=complex)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise ScenarioError(f"observable {self.name!r}: matrix must be square")
        if self.source == "function-of-frame":
            if np.max(np.abs(data - data.conj().T)) > 1e-12:
                raise ScenarioError(
                    f"observable {self.name!r}: function-of-frame seed must be Hermitian"
                )
        object.__setattr__(self, "data", data)


@dataclass(frozen=True)
class HamiltonianModel:
    """A parametrized family producing H(t) plus declared observables.

    params holds named scalars (and, for similarity-rand, the energy list and
    seed); h_schedule attaches a time dependence to any scalar parameter.
    """

    dimension: int
    family: str
    params: Mapping[str, object] = field(default_factory=dict)
    h_schedule: Mapping[str, ScheduleSpec] = field(default_factory=dict)
    a_observables: tuple[ObservableSpec, ...] = ()

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ScenarioError(f"unknown family tag {self.family!r}; expected one of {FAMILIES}")
        if int(self.dimension) != self.dimension or self.dimension < 2:
            raise ScenarioError(f"dimension must be an integer >= 2, got {self.dimension}")
        object.__setattr__(self, "dimension", int(self.dimension))
        object.__setattr__(self, "params", dict(self.params))
        object.__setattr__(self, "h_schedule", dict(self.h_schedule))
        object.__setattr__(self, "a_observables", tuple(self.a_observables))
        for key in self.h_schedule:
            if key not in self.params:
                raise ScenarioError(f"schedule refers to unknown parameter {key!r}")
        _validate_family(self)

    @property
    def is_time_dependent(self) -> bool:
        """True when some parameter genuinely varies in time."""
        return any(not s.is_static for s in self.h_schedule.values())

    def param(self, name: str, t: float) -> complex:
        """Parameter value at time ``t`` (schedule applied when attached)."""
        if name in self.h_schedule:
            return eval_schedule(self.h_schedule[name], t)
        if name not in self.params:
            raise ScenarioError(f"family {self.family!r} needs parameter {name!r}")
        return complex(self.params[name])

    def real_param(self, name: str, t: float) -> float:
        value = self.param(name, t)
        if abs(value.imag) > _REAL_PARAM_TOL * (1.0 + abs(value)):
            raise ScenarioError(
                f"parameter {name!r} of family {self.family!r} must be real, got {value}"
            )
        return value.real


def build_hamiltonian(model: HamiltonianModel, t: float) -> np.ndarray:
    """Complex N x N matrix H(t) for the model family."""
    n = model.dimension
    if model.family == "triangular2":
        e1 = model.real_param("e1", t)
        e2 = model.real_param("e2", t)
        c = model.param("c", t)
        return np.array([[e1, c], [0.0, e2]], dtype=complex)
    if model.family == "pt2":
        gamma = model.real_param("gamma", t)
        s = model.real_param("s", t)
        return np.array([[1j * gamma, s], [s, -1j * gamma]], dtype=complex)
    if model.family == "similarity-rand":
        energies = _similarity_energies(model)
        s_mat = _similarity_matrix(n, int(model.params.get("seed", 0)))
        return s_mat @ np.diag(energies.astype(complex)) @ np.linalg.inv(s_mat)
    # cubic-trunc
    g = model.real_param("g", t)
    p2, x3 = _oscillator_blocks(n)
    return p2 + 1j * g * x3


def build_hamiltonian_derivative(model: HamiltonianModel, t: float) -> np.ndarray:
    """Analytic dH/dt (zero for families without scheduled parameters)."""
    n = model.dimension
    if not model.is_time_dependent:
        return np.zeros((n, n), dtype=complex)
    if model.family == "triangular2":
        cdot = _param_derivative(model, "c", t)
        e1dot = _param_derivative(model, "e1", t)
        e2dot = _param_derivative(model, "e2", t)
        return np.array([[e1dot, cdot], [0.0, e2dot]], dtype=complex)
    if model.family == "pt2":
        gdot = _param_derivative(model, "gamma", t)
        sdot = _param_derivative(model, "s", t)
        return np.array([[1j * gdot, sdot], [sdot, -1j * gdot]], dtype=complex)
    if model.family == "cubic-trunc":
        gdot = _param_derivative(model, "g", t)
        _, x3 = _oscillator_blocks(n)
        return 1j * gdot * x3
    # similarity-rand is constant by construction
    return np.zeros((n, n), dtype=complex)


def realize_observable(
    spec: ObservableSpec,
    hamiltonian: np.ndarray,
    omega: np.ndarray,
    omega_inv: np.ndarray,
) -> np.ndarray:
    """Observable matrix A(t) given the same-time Hamiltonian and dressing."""
    if spec.source == "hamiltonian-itself":
        return hamiltonian
    if spec.source == "user-matrix":
        return spec.data
    return omega_inv @ spec.data @ omega


def _param_derivative(model: HamiltonianModel, name: str, t: float) -> complex:
    if name in model.h_schedule:
        return eval_schedule_derivative(model.h_schedule[name], t)
    return 0.0 + 0.0j


def _similarity_energies(model: HamiltonianModel) -> np.ndarray:
    raw = model.params.get("energies")
    if raw is None:
        raise ScenarioError("family 'similarity-rand' needs parameter 'energies'")
    energies = np.asarray(raw, dtype=float)
    if energies.shape != (model.dimension,):
        raise ScenarioError(
            f"'energies' must list {model.dimension} real values, got shape {energies.shape}"
        )
    return energies


@functools.lru_cache(maxsize=64)
def _similarity_matrix(n: int, seed: int) -> np.ndarray:
    """Seeded invertible S with cond(S) < 1e3, resampled until it qualifies."""
    rng = np.random.default_rng(seed)
    for _ in range(128):
        s = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
        if np.linalg.cond(s) < _MAX_SIMILARITY_COND:
            return s
    raise ScenarioError(f"could not draw a well-conditioned {n}x{n} similarity matrix")


@functools.lru_cache(maxsize=64)
def _oscillator_blocks(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Exact p^2 and x^3 oscillator matrix elements on the first n levels.

    Built in a padded space (x^3 couples three levels up) and cut back, so the
    kept block carries the infinite-basis matrix elements, not the projected
    operator products.
    """
    m = n + 3
    a = np.zeros((m, m), dtype=complex)
    for k in range(1, m):
        a[k - 1, k] = np.sqrt(k)
    ad = a.conj().T
    x = (a + ad) / np.sqrt(2.0)
    p = 1j * (ad - a) / np.sqrt(2.0)
    p2 = (p @ p)[:n, :n]
    x3 = (x @ x @ x)[:n, :n]
    return p2, x3


def _validate_family(model: HamiltonianModel):
    n = model.dimension
    if model.family in ("triangular2", "pt2") and n != 2:
        raise ScenarioError(f"family {model.family!r} is two-dimensional, got N={n}")
    if model.family == "triangular2":
        for name in ("e1", "e2", "c"):
            model.param(name, 0.0)
        model.real_param("e1", 0.0)
        model.real_param("e2", 0.0)
    elif model.family == "pt2":
        gamma = model.real_param("gamma", 0.0)
        s = model.real_param("s", 0.0)
        if s <= 0.0:
            raise ScenarioError(f"family 'pt2': coupling s must be positive, got {s}")
        if abs(gamma) >= s:
            raise ScenarioError(
                f"family 'pt2': |gamma(0)|={abs(gamma)} >= s={s}, spectrum not real at t=0"
            )
    elif model.family == "similarity-rand":
        _similarity_energies(model)
        if model.h_schedule:
            raise ScenarioError("family 'similarity-rand' does not take schedules")
        seed = model.params.get("seed", 0)
        if int(seed) != seed:
            raise ScenarioError(f"'seed' must be an integer, got {seed!r}")
    else:  # cubic-trunc
        g = model.real_param("g", 0.0)
        if g <= 0.0:
            raise ScenarioError(f"family 'cubic-trunc': coupling g must be positive, got {g}")


def spectrum_closed_form(model: HamiltonianModel, t: float) -> np.ndarray | None:
    """Known closed-form spectrum for families that have one, else None."""
    if model.family == "triangular2":
        return np.array([model.real_param("e1", t), model.real_param("e2", t)])
    if model.family == "pt2":
        gamma = model.real_param("gamma", t)
        s = model.real_param("s", t)
        disc = s * s - gamma * gamma
        if disc < 0.0:
            return None
        root = np.sqrt(disc)
        return np.array([-root, root])
    if model.family == "similarity-rand":
        return np.sort(_similarity_energies(model))
    return None
