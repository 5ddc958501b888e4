"""Scenario documents: parsing, validation, overrides, and sweep paths.

A scenario is a YAML document with these top-level keys (normative):

    model          family, dimension, params, h_schedule, a_observables
    mu             list of N schedule specs for the metric coefficients
    time           t0, t1, dt  (dt must divide the interval exactly)
    initial_state  {preset: uniform} | {preset: eigenstate, index: k}
                   | {vector: [...]}            (default: uniform)
    pictures       subset of [right, left, standard]   (default: all)
    checks         list of check names or {name, threshold} entries
                   (default: every applicable check)
    evolution      generator: hgen | h-only; omega_dot: auto |
                   analytic-mu-only | finite-difference; reality: assert |
                   report                       (all optional)
    outputs        observable names to add as expectation-value CSV columns
                   (default: all declared observables)
    seed           integer fed to seeded constructions  (default: 0)

Metric-coefficient schedules that can vanish anywhere on [t0, t1] are
rejected here, at parse time.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np
import yaml

from .errors import ScenarioError
from .evolution import PICTURES, time_grid
from .model import HamiltonianModel, ObservableSpec
from .schedules import ScheduleSpec, validate_nonvanishing
from .verify import DEFAULT_THRESHOLDS

_SCHEDULE_KEYS = {"kind", "base", "rate", "amplitude", "frequency", "phase"}
_TOP_KEYS = {"name", "model", "mu", "time", "initial_state", "pictures", "checks",
             "evolution", "outputs", "seed"}
_TIME_KEYS = {"t0", "t1", "dt"}
_MODEL_KEYS = {"family", "dimension", "params", "h_schedule", "a_observables"}
_EVOLUTION_KEYS = {"generator", "omega_dot", "reality"}
_OBSERVABLE_KEYS = {"name", "matrix_source", "source", "data"}


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated run description."""

    name: str
    model: HamiltonianModel
    mu: tuple[ScheduleSpec, ...]
    t0: float
    t1: float
    dt: float
    initial_state: Any
    pictures: tuple[str, ...]
    check_selection: tuple[str, ...] | None
    check_overrides: Mapping[str, float]
    generator: str
    omega_dot_mode: str
    reality_policy: str
    outputs: tuple[str, ...]
    seed: int
    raw: dict = field(repr=False, default_factory=dict)

    @property
    def steps(self) -> int:
        return int(round((self.t1 - self.t0) / self.dt))


def parse_scenario(text: str, name: str = "scenario") -> ScenarioConfig:
    """Parse and validate one scenario document."""
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioError(f"scenario document is not valid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ScenarioError("scenario document must be a mapping at top level")
    return scenario_from_dict(raw, name=name)


def scenario_from_dict(raw: dict, name: str = "scenario") -> ScenarioConfig:
    raw = copy.deepcopy(raw)
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ScenarioError(f"unknown scenario keys: {sorted(unknown)}")
    name = str(raw.get("name", name))

    model_doc = _require(raw, "model", dict)
    time_doc = _require(raw, "time", dict)
    mu_doc = _require(raw, "mu", list)
    _reject_unknown(time_doc, _TIME_KEYS, "time")
    _reject_unknown(model_doc, _MODEL_KEYS, "model")

    t0 = _number(time_doc, "time.t0")
    t1 = _number(time_doc, "time.t1")
    dt = _number(time_doc, "time.dt")
    if dt <= 0.0:
        raise ScenarioError(f"time.dt must be positive, got {dt}")
    time_grid(t0, t1, dt)  # validates divisibility and minimum step count

    model = _parse_model(model_doc)

    if len(mu_doc) != model.dimension:
        raise ScenarioError(
            f"mu lists {len(mu_doc)} schedules but the model dimension is {model.dimension}"
        )
    mu = tuple(_parse_schedule(entry, f"mu[{k}]") for k, entry in enumerate(mu_doc))
    for k, spec in enumerate(mu):
        validate_nonvanishing(spec, t0, t1, label=f"mu[{k}]")

    initial_state = _parse_initial_state(raw.get("initial_state", {"preset": "uniform"}))

    pictures = tuple(raw.get("pictures", list(PICTURES)))
    for p in pictures:
        if p not in PICTURES:
            raise ScenarioError(f"unknown picture {p!r}; expected a subset of {PICTURES}")
    if "right" not in pictures:
        raise ScenarioError("pictures must include 'right'")

    selection, overrides = _parse_checks(raw.get("checks"))

    evo = raw.get("evolution", {}) or {}
    if not isinstance(evo, dict):
        raise ScenarioError("evolution must be a mapping")
    _reject_unknown(evo, _EVOLUTION_KEYS, "evolution")
    generator = str(evo.get("generator", "hgen"))
    if generator not in ("hgen", "h-only"):
        raise ScenarioError(f"evolution.generator must be 'hgen' or 'h-only', got {generator!r}")
    omega_dot_mode = str(evo.get("omega_dot", "auto"))
    reality_policy = str(evo.get("reality", "assert"))
    if reality_policy not in ("assert", "report"):
        raise ScenarioError(f"evolution.reality must be 'assert' or 'report', got {reality_policy!r}")

    declared = [obs.name for obs in model.a_observables]
    outputs = raw.get("outputs")
    if outputs is None:
        outputs = declared
    if not isinstance(outputs, list):
        raise ScenarioError("outputs must be a list of observable names")
    for out in outputs:
        if out not in declared:
            raise ScenarioError(f"outputs names unknown observable {out!r} (declared: {declared})")

    seed = raw.get("seed", 0)
    if int(seed) != seed:
        raise ScenarioError(f"seed must be an integer, got {seed!r}")

    return ScenarioConfig(
        name=name,
        model=model,
        mu=mu,
        t0=t0,
        t1=t1,
        dt=dt,
        initial_state=initial_state,
        pictures=pictures,
        check_selection=selection,
        check_overrides=overrides,
        generator=generator,
        omega_dot_mode=omega_dot_mode,
        reality_policy=reality_policy,
        outputs=tuple(str(o) for o in outputs),
        seed=int(seed),
        raw=raw,
    )


def apply_overrides(raw: dict, overrides: list[str]) -> dict:
    """Apply repeatable ``key.path=value`` overrides to a raw scenario dict.

    Values are parsed as YAML scalars, so `time.dt=5e-4` arrives as a float
    and `evolution.generator=h-only` as a string.  List elements are indexed
    numerically: `mu.0.rate=0.2`.
    """
    raw = copy.deepcopy(raw)
    for item in overrides:
        if "=" not in item:
            raise ScenarioError(f"override {item!r} is not of the form key.path=value")
        path, _, text = item.partition("=")
        set_by_path(raw, path.strip(), parse_scalar_text(text))
    return raw


def parse_scalar_text(text: str):
    """YAML-parse one command-line value; rescue exponent-only floats.

    YAML 1.1 treats `1e-3` (no decimal point) as a string, which is never
    what a numeric flag means.
    """
    value = yaml.safe_load(text)
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            return value
    return value


def set_by_path(raw: dict, path: str, value) -> None:
    """Set a nested config entry addressed by a dotted path."""
    parts = [p for p in path.split(".") if p]
    if not parts:
        raise ScenarioError("empty parameter path")
    node = raw
    for key in parts[:-1]:
        node = _descend(node, key, path)
        if not isinstance(node, (dict, list)):
            raise ScenarioError(f"path {path!r}: {key!r} is not a container")
    leaf = parts[-1]
    if isinstance(node, list):
        node[_index(leaf, node, path)] = value
    elif isinstance(node, dict):
        node[leaf] = value
    else:
        raise ScenarioError(f"path {path!r} does not resolve to a settable entry")


def _descend(node, key: str, path: str):
    if isinstance(node, list):
        return node[_index(key, node, path)]
    if isinstance(node, dict):
        if key not in node:
            node[key] = {}
        return node[key]
    raise ScenarioError(f"path {path!r}: cannot descend into {type(node).__name__}")


def _index(key: str, node: list, path: str) -> int:
    try:
        idx = int(key)
    except ValueError:
        raise ScenarioError(f"path {path!r}: {key!r} is not a list index") from None
    if not 0 <= idx < len(node):
        raise ScenarioError(f"path {path!r}: index {idx} out of range")
    return idx


def _reject_unknown(doc: dict, allowed: set, label: str):
    unknown = set(doc) - allowed
    if unknown:
        raise ScenarioError(f"unknown {label} keys: {sorted(unknown)}")


def _require(raw: dict, key: str, kind) -> Any:
    if key not in raw:
        raise ScenarioError(f'missing required key "{key}"')
    value = raw[key]
    if not isinstance(value, kind):
        raise ScenarioError(f'key "{key}" must be a {kind.__name__}')
    return value


def _number(doc: dict, dotted: str) -> float:
    key = dotted.split(".")[-1]
    if key not in doc:
        raise ScenarioError(f'missing required key "{dotted}"')
    value = doc[key]
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ScenarioError(f'key "{dotted}" must be a number, got {value!r}')
    return float(value)


def _parse_model(doc: dict) -> HamiltonianModel:
    if "family" not in doc:
        raise ScenarioError('missing required key "model.family"')
    if "dimension" not in doc:
        raise ScenarioError('missing required key "model.dimension"')
    params = doc.get("params", {}) or {}
    if not isinstance(params, dict):
        raise ScenarioError("model.params must be a mapping")
    params = {k: _scalar(v, f"model.params.{k}") for k, v in params.items()}

    schedules = doc.get("h_schedule", {}) or {}
    if not isinstance(schedules, dict):
        raise ScenarioError("model.h_schedule must be a mapping")
    h_schedule = {k: _parse_schedule(v, f"model.h_schedule.{k}") for k, v in schedules.items()}

    observables = []
    for k, entry in enumerate(doc.get("a_observables", []) or []):
        observables.append(_parse_observable(entry, k))

    return HamiltonianModel(
        dimension=doc["dimension"],
        family=str(doc["family"]),
        params=params,
        h_schedule=h_schedule,
        a_observables=tuple(observables),
    )


def _parse_observable(entry, index: int) -> ObservableSpec:
    if not isinstance(entry, dict):
        raise ScenarioError(f"a_observables[{index}] must be a mapping")
    _reject_unknown(entry, _OBSERVABLE_KEYS, f"a_observables[{index}]")
    name = str(entry.get("name", f"A{index}"))
    source = entry.get("matrix_source", entry.get("source"))
    if source is None:
        raise ScenarioError(f"observable {name!r}: missing 'matrix_source'")
    data = entry.get("data")
    if data is not None:
        data = _complex_matrix(data, f"observable {name!r} data")
    return ObservableSpec(name=name, source=str(source), data=data)


def _parse_schedule(entry, label: str) -> ScheduleSpec:
    if isinstance(entry, (int, float)) and not isinstance(entry, bool):
        return ScheduleSpec(kind="constant", base=float(entry))
    if not isinstance(entry, dict):
        raise ScenarioError(f"{label}: schedule must be a mapping or a number")
    unknown = set(entry) - _SCHEDULE_KEYS
    if unknown:
        raise ScenarioError(f"{label}: unknown schedule keys {sorted(unknown)}")
    if "kind" not in entry:
        raise ScenarioError(f'{label}: missing required key "kind"')
    kwargs = {"kind": str(entry["kind"])}
    if "base" in entry:
        kwargs["base"] = _scalar(entry["base"], f"{label}.base")
    for key in ("rate", "amplitude", "frequency", "phase"):
        if key in entry:
            value = entry[key]
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ScenarioError(f"{label}.{key} must be a real number")
            kwargs[key] = float(value)
    return ScheduleSpec(**kwargs)


def _scalar(value, label: str) -> complex:
    """Accept real numbers, [re, im] pairs, or lists (passed through for
    list-valued parameters such as similarity-rand energies)."""
    if isinstance(value, bool):
        raise ScenarioError(f"{label} must be a number")
    if isinstance(value, (int, float)):
        return value
    if isinstance(value, list):
        if len(value) == 2 and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
            return complex(value[0], value[1])
        return value  # e.g. energies list; validated by the family
    raise ScenarioError(f"{label} must be a number or [re, im] pair, got {value!r}")


def _complex_matrix(data, label: str) -> np.ndarray:
    try:
        rows = []
        for row in data:
            rows.append([_scalar(v, label) for v in row])
        return np.array(rows, dtype=complex)
    except (TypeError, ScenarioError) as exc:
        raise ScenarioError(f"{label}: expected a nested list matrix ({exc})") from exc


def _parse_initial_state(entry):
    if isinstance(entry, dict):
        if "preset" in entry:
            preset = str(entry["preset"])
            if preset == "uniform":
                return "uniform"
            if preset == "eigenstate":
                if "index" not in entry:
                    raise ScenarioError('initial_state preset "eigenstate" needs "index"')
                return ("eigenstate", int(entry["index"]))
            raise ScenarioError(f"unknown initial_state preset {preset!r}")
        if "vector" in entry:
            vec = [_scalar(v, "initial_state.vector") for v in entry["vector"]]
            return np.array(vec, dtype=complex)
    raise ScenarioError(
        "initial_state must be {preset: uniform}, {preset: eigenstate, index: k}, "
        "or {vector: [...]}"
    )


def _parse_checks(entry):
    if entry is None:
        return None, {}
    if not isinstance(entry, list):
        raise ScenarioError("checks must be a list")
    selection = []
    overrides = {}
    for item in entry:
        if isinstance(item, str):
            name = item
        elif isinstance(item, dict) and "name" in item:
            name = str(item["name"])
            if "threshold" in item:
                thr = item["threshold"]
                if not isinstance(thr, (int, float)) or isinstance(thr, bool) or thr <= 0:
                    raise ScenarioError(f"check {name!r}: threshold must be a positive number")
                overrides[name] = float(thr)
        else:
            raise ScenarioError(f"checks entries must be names or {{name, threshold}}: {item!r}")
        if name not in DEFAULT_THRESHOLDS:
            raise ScenarioError(f"unknown check name {name!r}")
        selection.append(name)
    return tuple(selection), overrides
