import json

import numpy as np
import pandas as pd
import pytest
from click.testing import CliRunner

from config.systems import BUILTIN_SPECS
from run import cli
from tools.expr_dsl import evaluate, parse, to_polynomial

XYZ = ["x", "y", "z"]


@pytest.fixture
def runner():
    return CliRunner()


def stdout_json(result):
    text = result.stdout
    return json.loads(text[text.index("{"):])


def polynomial_of(text, names):
    return to_polynomial(parse(text, names))


def test_examples_writes_builtin_specs(runner, tmp_path):
    result = runner.invoke(cli, ["examples", "--output-dir", str(tmp_path)])
    assert result.exit_code == 0
    for name, document in BUILTIN_SPECS.items():
        assert json.loads((tmp_path / f"{name}.json").read_text()) == document


def test_examples_single_and_unknown(runner, tmp_path):
    assert runner.invoke(cli, ["examples", "cubic", "--output-dir", str(tmp_path)]).exit_code == 0
    assert (tmp_path / "cubic.json").exists()
    assert not (tmp_path / "rotator.json").exists()
    assert runner.invoke(cli, ["examples", "pendulum", "--output-dir", str(tmp_path)]).exit_code == 1


def test_simulate_rotator(runner, spec_dir, tmp_path):
    out = tmp_path / "out"
    result = runner.invoke(
        cli, ["simulate", str(spec_dir / "rotator.json"), "--t-end", "1", "--dt", "0.01", "--output-dir", str(out)]
    )
    assert result.exit_code == 0, result.output
    frame = pd.read_csv(out / "rotator_trajectory.csv")
    assert frame.iloc[0].tolist() == [0.0, 1.0, 1.0, 1.0]
    assert frame["t"].iloc[-1] == 1.0
    report = json.loads((out / "rotator_conservation.json").read_text())
    quantities = {q["name"]: q for q in report["quantities"]}
    assert quantities["h"]["initial"] == 1.5
    assert quantities["g"]["initial"] == pytest.approx(11 / 12)
    assert report["method"] == "rk4"


def test_simulate_cubic_with_explicit_paths(runner, spec_dir, tmp_path):
    csv_path, json_path = tmp_path / "c.csv", tmp_path / "c.json"
    result = runner.invoke(
        cli,
        [
            "simulate", str(spec_dir / "cubic.json"), "--t-end", "0.05", "--dt", "1e-4",
            "--out-csv", str(csv_path), "--out-json", str(json_path),
        ],
    )
    assert result.exit_code == 0, result.output
    quantities = {q["name"]: q for q in json.loads(json_path.read_text())["quantities"]}
    assert quantities["u1"]["initial"] == 14
    assert quantities["u2"]["initial"] == 6
    assert quantities["u1"]["max_drift"] <= 1e-6


def test_simulate_canonical_adds_energy(runner, spec_dir, tmp_path):
    result = runner.invoke(
        cli,
        [
            "simulate", str(spec_dir / "rotator.json"), "--t-end", "0.5", "--dt", "0.01",
            "--p0", "1", "1", "1", "--output-dir", str(tmp_path),
        ],
    )
    assert result.exit_code == 0, result.output
    frame = pd.read_csv(tmp_path / "rotator_trajectory.csv")
    assert list(frame.columns) == ["t", "x1", "x2", "x3", "p1", "p2", "p3"]
    report = json.loads((tmp_path / "rotator_conservation.json").read_text())
    assert report["canonical"]
    assert "H" in [q["name"] for q in report["quantities"]]


def test_invalid_step_size_exits_one_without_files(runner, spec_dir, tmp_path):
    result = runner.invoke(cli, ["simulate", str(spec_dir / "rotator.json"), "--dt", "0", "--output-dir", str(tmp_path)])
    assert result.exit_code == 1
    assert not list(tmp_path.glob("rotator_*"))


def test_divergence_exits_two_without_files(runner, make_spec, tmp_path):
    path = make_spec("blowup", {"name": "blowup", "variables": XYZ, "A": ["x^2", "0", "0"], "r0": [1, 0, 0]})
    out = tmp_path / "out"
    result = runner.invoke(cli, ["simulate", path, "--t-end", "2", "--dt", "0.01", "--output-dir", str(out)])
    assert result.exit_code == 2
    assert not out.exists() or not list(out.iterdir())


def test_missing_spec_and_usage_errors_exit_one(runner, tmp_path):
    assert runner.invoke(cli, ["simulate", str(tmp_path / "absent.json")]).exit_code == 1
    assert runner.invoke(cli, ["simulate"]).exit_code == 1
    assert runner.invoke(cli, ["no-such-command"]).exit_code == 1
    assert runner.invoke(cli, ["find-invariants", "x.json", "--max-degree", "two"]).exit_code == 1


def test_verify_cubic_reconstructs_nambu_form(runner, spec_dir):
    result = runner.invoke(cli, ["verify", str(spec_dir / "cubic.json"), "--json"])
    assert result.exit_code == 0, result.output
    summary = stdout_json(result)
    assert [r["verdict"] for r in summary["reports"]] == ["pass", "pass"]
    assert summary["functional"]["verdict"] == "pass"
    rec = summary["reconstruction"]
    assert rec["success"]
    assert polynomial_of(rec["h"], XYZ) == polynomial_of("x*y*z", XYZ)
    assert polynomial_of(rec["g"], XYZ) == polynomial_of("x^2 + y^2 + z^2", XYZ)


def test_verify_rotator_passes(runner, spec_dir, tmp_path):
    out = tmp_path / "verify.json"
    result = runner.invoke(cli, ["verify", str(spec_dir / "rotator.json"), "--out-json", str(out)])
    assert result.exit_code == 0, result.output
    assert "h: pass" in result.stdout
    assert json.loads(out.read_text())["reconstruction"]["success"]


def test_failed_candidate_exits_three(runner, make_spec):
    path = make_spec(
        "wrong",
        {"name": "wrong", "variables": XYZ, "A": ["2*x*(z^2-y^2)", "2*y*(x^2-z^2)", "2*z*(y^2-x^2)"], "invariants": {"x": "x"}},
    )
    result = runner.invoke(cli, ["verify", path])
    assert result.exit_code == 3
    assert "x: fail" in result.stdout


def test_find_invariants_cubic(runner, spec_dir):
    result = runner.invoke(cli, ["find-invariants", str(spec_dir / "cubic.json"), "--max-degree", "3", "--json"])
    assert result.exit_code == 0, result.output
    report = stdout_json(result)
    assert set(report["basis"]) == {"1", "x^2 + y^2 + z^2", "x*y*z"}
    assert report["verdict"] == "pass"


def test_find_invariants_needs_polynomial_field(runner, make_spec):
    path = make_spec("wave", {"name": "wave", "variables": XYZ, "A": ["sin(x)", "0", "0"]})
    assert runner.invoke(cli, ["find-invariants", path]).exit_code == 1


def test_hamiltonize_cubic(runner, spec_dir):
    result = runner.invoke(cli, ["hamiltonize", str(spec_dir / "cubic.json"), "--json"])
    assert result.exit_code == 0, result.output
    summary = stdout_json(result)
    assert summary["momentum_names"] == ["p1", "p2", "p3"]
    expected = ["2*x*(z^2-y^2)", "2*y*(x^2-z^2)", "2*z*(y^2-x^2)"]
    assert [polynomial_of(e, XYZ) for e in summary["rdot"]] == [polynomial_of(e, XYZ) for e in expected]
    assert polynomial_of(summary["pdot"][0], XYZ + ["p1", "p2", "p3"]) == polynomial_of(
        "-(p1*(2*z^2-2*y^2) + p2*4*x*y - p3*4*x*z)", XYZ + ["p1", "p2", "p3"]
    )


def test_hamiltonize_text_output(runner, spec_dir):
    result = runner.invoke(cli, ["hamiltonize", str(spec_dir / "cubic.json")])
    assert result.exit_code == 0
    lines = result.stdout.strip().splitlines()
    assert lines[-7].startswith("H = ")
    assert [line.split(" = ")[0] for line in lines[-6:]] == ["dx/dt", "dy/dt", "dz/dt", "dp1/dt", "dp2/dt", "dp3/dt"]


def test_hamiltonize_self_pair_is_zero(runner, make_spec):
    path = make_spec("flat", {"name": "flat", "variables": XYZ, "h": "x*y*z", "g": "x*y*z"})
    summary = stdout_json(runner.invoke(cli, ["hamiltonize", path, "--json"]))
    assert polynomial_of(summary["H"], XYZ + ["p1", "p2", "p3"]).is_zero()


def test_hamiltonize_rotator_numeric(runner, spec_dir):
    result = runner.invoke(cli, ["hamiltonize", str(spec_dir / "rotator.json"), "--numeric", "--json"])
    summary = stdout_json(result)
    names = ["l_x", "l_y", "l_z", "p1", "p2", "p3"]
    expected = "-1/6*p1*l_y*l_z + 2/3*p2*l_x*l_z - 1/2*p3*l_x*l_y"
    assert polynomial_of(summary["H"], names) == polynomial_of(expected, names)
    assert summary["params"] == {}


def test_hamiltonize_rotator_numeric_text(runner, spec_dir):
    result = runner.invoke(cli, ["hamiltonize", str(spec_dir / "rotator.json"), "--numeric"])
    assert result.exit_code == 0, result.output
    lines = result.stdout.strip().splitlines()
    assert lines[-7] == "H = -1/6*p1*l_y*l_z + 2/3*p2*l_x*l_z - 1/2*p3*l_x*l_y"
    assert lines[-6] == "dl_x/dt = -1/6*l_y*l_z"


def test_hamiltonize_rotator_symbolic_text(runner, spec_dir):
    result = runner.invoke(cli, ["hamiltonize", str(spec_dir / "rotator.json")])
    assert result.exit_code == 0, result.output
    lines = result.stdout.strip().splitlines()
    text = "\n".join(lines[-7:])
    assert "0/" not in text
    assert "I_y" in lines[-7] and "I_z" in lines[-7]

    names = ["l_x", "l_y", "l_z", "p1", "p2", "p3"]
    inertia = ["I_x", "I_y", "I_z"]
    H = parse(lines[-7][len("H = "):], names, inertia)
    expected = polynomial_of("-1/6*p1*l_y*l_z + 2/3*p2*l_x*l_z - 1/2*p3*l_x*l_y", names)
    values = {"I_x": 1, "I_y": 2, "I_z": 3}
    rng = np.random.default_rng(5)
    for _ in range(10):
        point = dict(zip(names, rng.uniform(-2, 2, 6).tolist()))
        assert evaluate(H, {**point, **values}) == pytest.approx(float(expected.evaluate(point)), abs=1e-12)


def test_seed_comes_from_flag_or_environment(runner, make_spec):
    path = make_spec(
        "spin", {"name": "spin", "variables": XYZ, "A": ["-y", "x", "0"], "invariants": {"r": "sin(x^2+y^2)"}}
    )
    from_env = stdout_json(runner.invoke(cli, ["verify", path, "--json"], env={"NAMBU_SEED": "7"}))
    assert from_env["reports"][0]["seed"] == 7
    assert from_env["reports"][0]["mode"] == "sampled"
    from_flag = stdout_json(runner.invoke(cli, ["verify", path, "--json", "--seed", "3"], env={"NAMBU_SEED": "7"}))
    assert from_flag["reports"][0]["seed"] == 3


def test_simulation_output_is_deterministic(runner, spec_dir, tmp_path):
    contents = []
    for run in ("a", "b"):
        out = tmp_path / run
        args = ["simulate", str(spec_dir / "rotator.json"), "--t-end", "0.5", "--dt", "0.01", "--output-dir", str(out)]
        assert runner.invoke(cli, args).exit_code == 0
        contents.append(((out / "rotator_trajectory.csv").read_bytes(), (out / "rotator_conservation.json").read_bytes()))
    assert contents[0] == contents[1]


def test_local_sweep_writes_one_cell_per_value(runner, spec_dir, tmp_path):
    result = runner.invoke(
        cli,
        [
            "sweep", str(spec_dir / "rotator.json"), "--param", "I_z", "--values", "3,7/2",
            "--t-end", "0.1", "--dt", "0.01", "--output-dir", str(tmp_path), "--local",
        ],
    )
    assert result.exit_code == 0, result.output
    for tag in ("I_z=3", "I_z=7over2"):
        assert (tmp_path / f"rotator_{tag}_trajectory.csv").exists()
        assert (tmp_path / f"rotator_{tag}_conservation.json").exists()


def test_sweep_unknown_parameter_exits_one(runner, spec_dir, tmp_path):
    result = runner.invoke(
        cli, ["sweep", str(spec_dir / "rotator.json"), "--param", "mass", "--values", "1", "--local",
              "--output-dir", str(tmp_path)],
    )
    assert result.exit_code == 1
