from pathlib import Path

import numpy as np
import pytest


SCENARIO_DIR = Path(__file__).resolve().parents[1] / "scenarios"

SHIPPED_SCENARIOS = (
    "static_hermitian",
    "exp_metric_drive",
    "tri_sin_drive",
    "pt2_gamma_ramp",
    "rand4_metric_sin",
    "cubic_osc_drive",
)


def load_scenario(name, **replacements):
    """Parse a shipped scenario, optionally overriding dotted config paths."""
    import yaml

    from qhdyn import scenario_from_dict
    from qhdyn.scenario import set_by_path

    raw = yaml.safe_load((SCENARIO_DIR / f"{name}.yaml").read_text(encoding="utf-8"))
    for key, value in replacements.items():
        set_by_path(raw, key, value)
    return scenario_from_dict(raw, name=name)


@pytest.fixture(scope="session")
def hand_frame():
    """Hand-verified biorthogonal frame of [[1, 1], [0, 2]]."""
    from qhdyn import BiorthogonalFrame

    return BiorthogonalFrame(
        t=0.0,
        energies=np.array([1.0 + 0.0j, 2.0 + 0.0j]),
        right_kets=np.array([[1.0, 1.0], [0.0, 1.0]], dtype=complex),
        left_bras=np.array([[1.0, -1.0], [0.0, 1.0]], dtype=complex),
        raw_overlaps=np.array([1.0, 1.0]),
    )


@pytest.fixture(scope="session")
def hand_matrix():
    return np.array([[1.0, 1.0], [0.0, 2.0]], dtype=complex)
