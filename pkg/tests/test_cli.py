import json
import math

import pytest

from foliation_forge.cli import (
    EXIT_BAD_INPUT,
    EXIT_FAILED_CHECKS,
    EXIT_OK,
    build_config,
    main,
    parse_args,
    run,
)


def summary(path):
    return json.loads((path / "summary.json").read_text())


def measured(document, name):
    return next(check for check in document["checks"] if check["name"] == name)["measured"]


def test_verify_lefschetz(tmp_path):
    argv = ["verify", "--scenario", "lefschetz", "--grid", "5,5,5,5", "--output", str(tmp_path), "-v", "0"]
    assert main(argv) == EXIT_OK
    document = summary(tmp_path)
    assert document["passed"] is True
    assert document["command"] == "verify"
    assert measured(document, "proportionality")["proportionality_constant"] == 4
    assert document["artifacts"] == ["singular_set.csv", "structure.json"]


def test_flow_endpoint(tmp_path):
    argv = [
        "flow", "--scenario", "fold", "--h", "x3", "--x0", "0,1,0,0", "--T", "1",
        "--output", str(tmp_path), "-v", "0",
    ]
    assert main(argv) == EXIT_OK
    last = (tmp_path / "trajectory_0.csv").read_text().splitlines()[-1].split(",")
    assert float(last[0]) == 1.0
    assert float(last[2]) == pytest.approx(math.cosh(1), abs=1e-6)
    assert float(last[3]) == pytest.approx(math.sinh(1), abs=1e-6)


def test_scaling_slope(tmp_path):
    argv = ["scaling", "--scenario", "fold", "--radii", "1e-1..1e-3", "--output", str(tmp_path), "-v", "0"]
    assert main(argv) == EXIT_OK
    scaling = json.loads((tmp_path / "scaling.json").read_text())
    assert scaling["slope"] == pytest.approx(-1.0, abs=1e-6)
    assert len(scaling["radii"]) == 5


def test_runs_are_deterministic(tmp_path):
    outputs = [tmp_path / "first", tmp_path / "second"]
    for output in outputs:
        argv = ["all", "--scenario", "fold", "--grid", "4,5,5,5", "--output", str(output), "-v", "0"]
        assert main(argv) == EXIT_OK
    names = sorted(path.name for path in outputs[0].iterdir())
    assert names == sorted(path.name for path in outputs[1].iterdir())
    for name in names:
        assert (outputs[0] / name).read_bytes() == (outputs[1] / name).read_bytes()


def test_failed_checks_exit_with_one(tmp_path):
    config = tmp_path / "fold.json"
    config.write_text(
        json.dumps(
            {
                "scenario": "fold",
                "k": "1 + x1",
                "radius": "1/2",
                "involution_pairs": [["x1", "x2"]],
                "grid": {"counts": [4, 5, 5, 5]},
                "random_cases": 0,
            }
        )
    )
    output = tmp_path / "out"
    assert main(["verify", "--config", str(config), "--output", str(output), "-v", "0"]) == (
        EXIT_FAILED_CHECKS
    )
    document = summary(output)
    assert document["passed"] is False
    involution = measured(document, "involution[x1,x2]")
    assert involution["witness"] == [0.0, "-1/2", "-1/2", "-1/2"]
    assert involution["residual"] == "-1/2"


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--scenario", "fold", "--k", "x1 +* 2"],
        ["verify"],
        ["flow", "--scenario", "fold", "--h", "x3"],
        ["verify", "--scenario", "lefschetz", "--grid", "5,five,5,5"],
    ],
)
def test_bad_input_exits_with_two(tmp_path, argv, capsys):
    assert main(argv + ["--output", str(tmp_path), "-v", "0"]) == EXIT_BAD_INPUT
    assert capsys.readouterr().err.startswith("ERROR:")


def test_unknown_scenario_key_exits_with_two(tmp_path):
    config = tmp_path / "bad.json"
    config.write_text(json.dumps({"scenario": "fold", "colour": "blue"}))
    assert main(["verify", "--config", str(config), "-v", "0"]) == EXIT_BAD_INPUT


def test_flags_override_the_config_file(tmp_path):
    config = tmp_path / "lefschetz.json"
    config.write_text(json.dumps({"scenario": "lefschetz", "k": "2", "seed": 3}))
    args = parse_args(["verify", "--config", str(config), "--k", "1 + x1^2", "--step", "0.01"])
    built = build_config(args)
    assert built.k == "1 + x1^2"
    assert built.seed == 3


def test_flow_flags_build_a_single_flow():
    args = parse_args(["flow", "--scenario", "fold", "--h", "x3", "--x0", "0,1/2,0,0", "--step", "0.01"])
    (flow,) = build_config(args).flows
    assert flow == {"h": "x3", "x0": ["0", "1/2", "0", "0"], "step": 0.01}


def test_unknown_command_is_rejected():
    with pytest.raises(SystemExit):
        parse_args(["explode", "--scenario", "fold"])


def test_run_from_a_config_path(tmp_path):
    config = tmp_path / "contrast.json"
    output = tmp_path / "out"
    config.write_text(json.dumps({"scenario": "contrast", "radii": "0.1,0.01", "output": str(output)}))
    assert run(config, "contrast") == EXIT_OK
    rows = (output / "contrast.csv").read_text().splitlines()
    assert rows[0] == "radius,omega_norm,leaf_ratio"
    assert len(rows) == 3


@pytest.mark.parametrize(
    "command, scenario", [("near-symplectic", "near-symplectic"), ("all", "contrast")]
)
def test_near_symplectic_runs_pass(tmp_path, command, scenario):
    argv = [command, "--scenario", scenario, "--grid", "4,5,5,5", "--output", str(tmp_path), "-v", "0"]
    assert main(argv) == EXIT_OK
    closed = measured(summary(tmp_path), "closed")
    assert "d_omega" not in closed


@pytest.mark.parametrize("data", [{"grid": [4, 5, 5, 5]}, {"random_cases": "3"}])
def test_malformed_config_exits_with_two(tmp_path, data, capsys):
    config = tmp_path / "bad.json"
    config.write_text(json.dumps({"scenario": "fold", **data}))
    output = tmp_path / "out"
    assert main(["verify", "--config", str(config), "--output", str(output), "-v", "0"]) == EXIT_BAD_INPUT
    assert capsys.readouterr().err.startswith("ERROR:")
    assert not output.exists()
