"""Run orchestration: scenario -> trajectory -> checks -> report files.

One run produces a `RunReport` carrying the per-step CSV rows, the invariant
reports, and wall-clock metadata.  The CSV layout is fixed (stable plotting
downstream): t, theta_norm, std_norm, equivalence_residual,
quasi_hermiticity_residual, theta_min_eig, theta_cond, Re/Im of each tracked
energy, then Re/Im of each requested expectation value.  Numbers are written
with 17 significant digits so a reread round-trips the doubles exactly.
"""

from __future__ import annotations

import time as _time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .dressing import DressingTrack, build_dressing_track, metric_conditioning, quasi_hermiticity_residual, theta_norm
from .errors import NumericalDomainError, ScenarioError
from .evolution import Trajectory, expectation, propagate_quasi, time_grid
from .model import realize_observable
from .scenario import ScenarioConfig, scenario_from_dict, set_by_path
from .verify import InvariantReport, run_standard_checks

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_NUMERICAL_ERROR = 3


@dataclass(frozen=True)
class RunReport:
    scenario: ScenarioConfig
    columns: tuple[str, ...]
    rows: tuple[tuple[float, ...], ...]
    reports: tuple[InvariantReport, ...]
    wall_clock_seconds: float
    version: str

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    def report(self, name: str) -> InvariantReport:
        for r in self.reports:
            if r.name == name:
                return r
        raise KeyError(name)


def run(config: ScenarioConfig) -> RunReport:
    """Execute one scenario deterministically.

    Raises `ScenarioError` / `NumericalDomainError` for configuration and
    domain failures; check failures are reported, not raised.
    """
    started = _time.perf_counter()
    _, fine = time_grid(config.t0, config.t1, config.dt)
    track = build_dressing_track(
        config.model,
        config.mu,
        fine,
        omega_dot_mode=config.omega_dot_mode,
        reality_policy=config.reality_policy,
    )
    trajectory = propagate_quasi(
        track,
        config.initial_state,
        pictures=config.pictures,
        use_plain_hamiltonian=(config.generator == "h-only"),
    )

    observable_series = _realize_observables(config, track, trajectory)
    reports = run_standard_checks(
        trajectory,
        track,
        observable_series=observable_series or None,
        selection=config.check_selection,
        overrides=config.check_overrides,
    )
    columns, rows = _tabulate(config, track, trajectory, observable_series)
    return RunReport(
        scenario=config,
        columns=columns,
        rows=rows,
        reports=tuple(reports),
        wall_clock_seconds=_time.perf_counter() - started,
        version=__version__,
    )


def _realize_observables(config: ScenarioConfig, track: DressingTrack, trajectory: Trajectory):
    series = {}
    for spec in config.model.a_observables:
        mats = []
        for k in range(len(trajectory.states)):
            j = 2 * k
            m = track.maps[j]
            mats.append(realize_observable(spec, track.hamiltonians[j], m.omega, m.omega_inv))
        series[spec.name] = mats
    return series


def _tabulate(config, track: DressingTrack, trajectory: Trajectory, observable_series):
    n = track.dimension
    columns = [
        "t",
        "theta_norm",
        "std_norm",
        "equivalence_residual",
        "quasi_hermiticity_residual",
        "theta_min_eig",
        "theta_cond",
    ]
    for k in range(1, n + 1):
        columns += [f"re_E{k}", f"im_E{k}"]
    for name in config.outputs:
        columns += [f"re_exp_{name}", f"im_exp_{name}"]

    phi0 = trajectory.initial.phi_right
    scale = float(np.linalg.norm(phi0))
    seed = track.maps[0].omega @ phi0

    rows = []
    for k, state in enumerate(trajectory.states):
        j = 2 * k
        m = track.maps[j]
        oracle = m.omega_inv @ (trajectory.u_series[k] @ seed)
        min_eig, cond = metric_conditioning(m.theta)
        row = [
            float(trajectory.times[k]),
            theta_norm(state.phi_right, m.theta),
            float(np.real(np.vdot(state.phi_right, state.phi_right))),
            float(np.linalg.norm(state.phi_right - oracle)) / scale,
            quasi_hermiticity_residual(track.hamiltonians[j], m.theta),
            min_eig,
            cond,
        ]
        for energy in track.frames[j].energies:
            row += [float(energy.real), float(energy.imag)]
        for name in config.outputs:
            value = expectation(state, observable_series[name][k], m.theta)
            row += [value.real, value.imag]
        rows.append(tuple(row))
    return tuple(columns), tuple(rows)


def format_number(value: float) -> str:
    return f"{value:.17g}"


def write_csv(report: RunReport, path: Path):
    lines = [",".join(report.columns)]
    for row in report.rows:
        lines.append(",".join(format_number(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def summary_text(report: RunReport) -> str:
    cfg = report.scenario
    lines = [
        f"scenario: {cfg.name}",
        f"family: {cfg.model.family}  N={cfg.model.dimension}",
        f"grid: t0={cfg.t0:g} t1={cfg.t1:g} dt={cfg.dt:g} steps={cfg.steps}",
        f"generator: {cfg.generator}  omega_dot: {cfg.omega_dot_mode}  reality: {cfg.reality_policy}",
        "",
    ]
    for r in report.reports:
        status = "PASS" if r.passed else "FAIL"
        lines.append(
            f"{status}  {r.name:<26} max residual {r.max_residual:.6e}  threshold {r.threshold:.1e}"
        )
    lines.append("")
    overall = "all checks passed" if report.passed else "CHECK FAILURE"
    lines.append(f"result: {overall}")
    lines.append(f"wall clock: {report.wall_clock_seconds:.3f} s   version: {report.version}")
    return "\n".join(lines) + "\n"


def report_json_dict(report: RunReport) -> dict:
    return {
        "version": report.version,
        "scenario": report.scenario.raw,
        "checks": [
            {
                "name": r.name,
                "max_residual": r.max_residual,
                "threshold": r.threshold,
                "passed": r.passed,
            }
            for r in report.reports
        ],
        "passed": report.passed,
        "rows": len(report.rows),
        "wall_clock_seconds": report.wall_clock_seconds,
    }


def write_outputs(report: RunReport, out_dir: Path) -> Path:
    """Write timeseries.csv, summary.txt, and report.json under out_dir/<name>."""
    import json

    run_dir = Path(out_dir) / report.scenario.name
    run_dir.mkdir(parents=True, exist_ok=True)
    write_csv(report, run_dir / "timeseries.csv")
    (run_dir / "summary.txt").write_text(summary_text(report), encoding="utf-8")
    (run_dir / "report.json").write_text(
        json.dumps(report_json_dict(report), indent=2) + "\n", encoding="utf-8"
    )
    return run_dir


@dataclass(frozen=True)
class SweepPoint:
    value: object
    report: RunReport | None
    error: str | None
    exit_code: int


def _sweep_one(args) -> SweepPoint:
    raw, path, value, label = args
    try:
        set_by_path(raw, path, value)
        raw["name"] = label  # one output directory per sweep point
        config = scenario_from_dict(raw, name=label)
        report = run(config)
        code = EXIT_OK if report.passed else EXIT_CHECK_FAILED
        return SweepPoint(value=value, report=report, error=None, exit_code=code)
    except ScenarioError as exc:
        return SweepPoint(value=value, report=None, error=str(exc), exit_code=EXIT_CONFIG_ERROR)
    except NumericalDomainError as exc:
        return SweepPoint(value=value, report=None, error=str(exc), exit_code=EXIT_NUMERICAL_ERROR)


def sweep(raw: dict, param_path: str, values: list, jobs: int = 1, name: str = "scenario") -> list[SweepPoint]:
    """Independent runs of one scenario with a config entry swept over values.

    Each point gets a deep-copied document; points run in parallel up to
    ``jobs``.  Errors are captured per point, not raised.
    """
    import copy as _copy

    if not values:
        return []
    tasks = []
    for value in values:
        label = f"{name}__{param_path.replace('.', '_')}={value}"
        tasks.append((_copy.deepcopy(raw), param_path, value, label))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_sweep_one, tasks))
    return [_sweep_one(t) for t in tasks]


def sweep_summary_text(param_path: str, points: list[SweepPoint]) -> str:
    lines = [f"sweep over {param_path}", ""]
    for p in points:
        if p.report is None:
            lines.append(f"{p.value!r:>16}  ERROR({p.exit_code}): {p.error}")
            continue
        worst = max(p.report.reports, key=lambda r: r.max_residual / r.threshold, default=None)
        status = "PASS" if p.report.passed else "FAIL"
        if worst is None:
            lines.append(f"{p.value!r:>16}  {status}")
        else:
            lines.append(
                f"{p.value!r:>16}  {status}  worst {worst.name} "
                f"max residual {worst.max_residual:.6e}"
            )
    return "\n".join(lines) + "\n"
