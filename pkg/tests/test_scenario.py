import numpy as np
import pytest

from qhdyn import ScenarioError, apply_overrides, parse_scenario, scenario_from_dict
from qhdyn.scenario import set_by_path

MINIMAL = """
model:
  family: triangular2
  dimension: 2
  params: {e1: 1.0, e2: 2.0, c: 1.0}
mu:
  - {kind: constant, base: 1.0}
  - {kind: constant, base: 1.0}
time: {t0: 0.0, t1: 1.0, dt: 0.01}
"""


def test_minimal_document_fills_defaults():
    cfg = parse_scenario(MINIMAL, name="minimal")
    assert cfg.name == "minimal"
    assert cfg.model.family == "triangular2"
    assert cfg.initial_state == "uniform"
    assert cfg.pictures == ("right", "left", "standard")
    assert cfg.check_selection is None  # all applicable checks
    assert cfg.generator == "hgen"
    assert cfg.omega_dot_mode == "auto"
    assert cfg.reality_policy == "assert"
    assert cfg.seed == 0
    assert cfg.steps == 100


def test_missing_dt_is_named():
    doc = MINIMAL.replace("time: {t0: 0.0, t1: 1.0, dt: 0.01}", "time: {t0: 0.0, t1: 1.0}")
    with pytest.raises(ScenarioError, match='"time.dt"'):
        parse_scenario(doc)


def test_missing_sections_are_named():
    with pytest.raises(ScenarioError, match='"model"'):
        parse_scenario("mu: []\ntime: {t0: 0, t1: 1, dt: 0.1}")
    with pytest.raises(ScenarioError, match='"mu"'):
        parse_scenario("model: {family: pt2, dimension: 2, params: {gamma: 0.0, s: 1.0}}\ntime: {t0: 0.0, t1: 1.0, dt: 0.1}")
    with pytest.raises(ScenarioError, match='"model.family"'):
        parse_scenario(MINIMAL.replace("family: triangular2\n  ", ""))


def test_vanishing_mu_rejected_at_parse_time():
    doc = MINIMAL.replace(
        "- {kind: constant, base: 1.0}\n  - {kind: constant, base: 1.0}",
        "- {kind: sinusoidal, base: 1.0, amplitude: 1.0, frequency: 2.0}\n  - {kind: constant, base: 1.0}",
    )
    with pytest.raises(ScenarioError, match="cross zero"):
        parse_scenario(doc)


def test_dimension_mismatch_rejected():
    doc = MINIMAL.replace("  - {kind: constant, base: 1.0}\n  - {kind: constant, base: 1.0}",
                          "  - {kind: constant, base: 1.0}")
    with pytest.raises(ScenarioError, match="dimension"):
        parse_scenario(doc)


def test_bad_time_grids_rejected():
    with pytest.raises(ScenarioError, match="positive"):
        parse_scenario(MINIMAL.replace("dt: 0.01", "dt: -0.01"))
    with pytest.raises(ScenarioError, match="integer number of steps"):
        parse_scenario(MINIMAL.replace("dt: 0.01", "dt: 0.3"))
    with pytest.raises(ScenarioError, match="t1 > t0"):
        parse_scenario(MINIMAL.replace("t1: 1.0", "t1: -1.0"))


def test_unknown_keys_rejected():
    with pytest.raises(ScenarioError, match="unknown scenario keys"):
        parse_scenario(MINIMAL + "\nbanana: 1\n")
    with pytest.raises(ScenarioError, match="unknown schedule keys"):
        parse_scenario(MINIMAL.replace("{kind: constant, base: 1.0}", "{kind: constant, slope: 1.0}", 1))


def test_checks_parsing():
    doc = MINIMAL + (
        "checks:\n"
        "  - theta-norm-conservation\n"
        "  - {name: equivalence, threshold: 1.0e-6}\n"
    )
    cfg = parse_scenario(doc)
    assert cfg.check_selection == ("theta-norm-conservation", "equivalence")
    assert cfg.check_overrides == {"equivalence": 1e-6}
    with pytest.raises(ScenarioError, match="unknown check"):
        parse_scenario(MINIMAL + "checks: [nonsense]\n")


def test_initial_state_forms():
    assert parse_scenario(MINIMAL + "initial_state: {preset: uniform}\n").initial_state == "uniform"
    cfg = parse_scenario(MINIMAL + "initial_state: {preset: eigenstate, index: 1}\n")
    assert cfg.initial_state == ("eigenstate", 1)
    cfg = parse_scenario(MINIMAL + "initial_state: {vector: [[1.0, 0.5], [0.0, -0.5]]}\n")
    np.testing.assert_allclose(cfg.initial_state, [1.0 + 0.5j, 0.0 - 0.5j])
    with pytest.raises(ScenarioError, match="initial_state"):
        parse_scenario(MINIMAL + "initial_state: {bogus: 1}\n")


def test_observable_parsing():
    doc = MINIMAL + (
        "name: obs\n"
        "outputs: [H, seed]\n"
    )
    doc = doc.replace(
        "params: {e1: 1.0, e2: 2.0, c: 1.0}",
        "params: {e1: 1.0, e2: 2.0, c: 1.0}\n"
        "  a_observables:\n"
        "    - {name: H, matrix_source: hamiltonian-itself}\n"
        "    - {name: seed, matrix_source: function-of-frame, data: [[1.0, 0.0], [0.0, -1.0]]}",
    )
    cfg = parse_scenario(doc)
    assert [o.name for o in cfg.model.a_observables] == ["H", "seed"]
    assert cfg.outputs == ("H", "seed")
    with pytest.raises(ScenarioError, match="unknown observable"):
        parse_scenario(MINIMAL + "outputs: [phantom]\n")


def test_evolution_block_validation():
    cfg = parse_scenario(MINIMAL + "evolution: {generator: h-only, omega_dot: finite-difference, reality: report}\n")
    assert cfg.generator == "h-only"
    assert cfg.omega_dot_mode == "finite-difference"
    assert cfg.reality_policy == "report"
    with pytest.raises(ScenarioError, match="generator"):
        parse_scenario(MINIMAL + "evolution: {generator: imaginary}\n")
    with pytest.raises(ScenarioError, match="reality"):
        parse_scenario(MINIMAL + "evolution: {reality: hope}\n")


def test_complex_base_via_pair():
    doc = MINIMAL.replace("- {kind: constant, base: 1.0}\n  - {kind: constant, base: 1.0}",
                          "- {kind: constant, base: [1.0, 0.5]}\n  - {kind: constant, base: 1.0}")
    cfg = parse_scenario(doc)
    assert cfg.mu[0].base == 1.0 + 0.5j


def test_overrides_and_paths():
    import yaml

    raw = yaml.safe_load(MINIMAL)
    out = apply_overrides(raw, ["time.dt=0.005", "mu.0.base=2.0", "evolution.generator=h-only"])
    assert out["time"]["dt"] == 0.005
    assert out["mu"][0]["base"] == 2.0
    assert out["evolution"]["generator"] == "h-only"
    # original untouched
    assert raw["time"]["dt"] == 0.01
    cfg = scenario_from_dict(out)
    assert cfg.dt == 0.005 and cfg.generator == "h-only"

    with pytest.raises(ScenarioError, match="form"):
        apply_overrides(raw, ["time.dt"])
    with pytest.raises(ScenarioError, match="out of range"):
        set_by_path(raw, "mu.7.base", 1.0)
    with pytest.raises(ScenarioError, match="list index"):
        set_by_path(raw, "mu.x.base", 1.0)


def test_exponent_only_floats_from_command_line():
    from qhdyn.scenario import parse_scalar_text

    assert parse_scalar_text("1e-3") == 1e-3
    assert parse_scalar_text("5e-4") == 5e-4
    assert parse_scalar_text("0.002") == 0.002
    assert parse_scalar_text("h-only") == "h-only"
    assert parse_scalar_text("[1, 2]") == [1, 2]

    import yaml

    raw = yaml.safe_load(MINIMAL)
    out = apply_overrides(raw, ["time.dt=1e-3"])
    assert out["time"]["dt"] == 1e-3


def test_unknown_subdocument_keys_rejected():
    with pytest.raises(ScenarioError, match="unknown time keys"):
        parse_scenario(MINIMAL.replace("dt: 0.01}", "dt: 0.01, dy: 1}"))
    with pytest.raises(ScenarioError, match="unknown evolution keys"):
        parse_scenario(MINIMAL + "evolution: {integrator: rk4}\n")


def test_nonmapping_document_rejected():
    with pytest.raises(ScenarioError, match="mapping"):
        parse_scenario("- 1\n- 2\n")
    with pytest.raises(ScenarioError, match="YAML"):
        parse_scenario("model: {family: [unbalanced\n")
