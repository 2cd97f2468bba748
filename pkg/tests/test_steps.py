from fractions import Fraction

import pytest

from data.utils import load_spec
from models.models import RunConfig
from steps.hamiltonization import hamiltonize_system
from steps.invariant_checks import search_invariants, verify_system
from steps.report_dashboard import nambu_dashboard
from steps.simulation import simulate_system, sweep_cell_config
from steps.system_loading import load_system_spec, override_parameter, with_parameter
from tools.errors import SpecError


@pytest.fixture
def rotator_spec(spec_dir):
    return load_spec(str(spec_dir / "rotator.json"))


def test_load_system_spec_checks_expressions(spec_dir, make_spec):
    spec = load_system_spec.entrypoint(str(spec_dir / "cubic.json"))
    assert spec.name == "cubic"
    bad = make_spec("bad", {"name": "bad", "variables": ["x", "y", "z"], "A": ["x*w", "y", "z"]})
    with pytest.raises(SpecError):
        load_system_spec.entrypoint(bad)


def test_override_parameter(rotator_spec):
    changed = override_parameter.entrypoint(rotator_spec, "I_z", "7/2")
    assert changed.param_values()["I_z"] == Fraction(7, 2)
    assert rotator_spec.params["I_z"] == 3
    with pytest.raises(SpecError):
        with_parameter(rotator_spec, "mass", "1")


def test_analysis_steps_feed_the_dashboard(rotator_spec, tmp_path):
    hamiltonian = hamiltonize_system.entrypoint(rotator_spec, True)
    assert hamiltonian.momentum_names == ["p1", "p2", "p3"]
    verification = verify_system.entrypoint(rotator_spec)
    assert verification.passed
    invariants = search_invariants.entrypoint(rotator_spec, 2)
    assert len(invariants.basis) == 3
    config = RunConfig(t_end=0.2, dt=0.01, out_csv=str(tmp_path / "t.csv"))
    frame, conservation = simulate_system.entrypoint(rotator_spec, config)
    assert list(frame.columns) == ["t", "x1", "x2", "x3"]
    assert len(frame) == 21
    assert (tmp_path / "t.csv").exists()

    html = nambu_dashboard.entrypoint(rotator_spec, hamiltonian, verification, invariants, conservation)
    assert "rotator" in html
    assert "Polynomial first integrals" in html
    assert "PASS" in html


def test_sweep_cell_file_names(tmp_path):
    cell = sweep_cell_config(RunConfig(), "rotator", "I_z", "5/2", str(tmp_path))
    assert cell.out_csv.endswith("rotator_I_z=5over2_trajectory.csv")
    assert cell.out_json.endswith("rotator_I_z=5over2_conservation.json")
