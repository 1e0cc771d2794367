import json

import pytest

from conftest import MAMMO
from sketchlda.cli import build_parser, int_grid, main

BASE = ["--data", str(MAMMO), "--label-col", "Severity", "--positive-class", "1",
        "--features", "Age,Shape,Margin,Density"]


def test_iteration_grid_syntax():
    assert int_grid("logspace:3:5:3") == [1000, 10000, 100000]
    assert int_grid("10,20") == [10, 20]
    assert build_parser().parse_args(["experiment", *BASE, "--step-size", "0.1,0.3"]).step_size == [0.1, 0.3]


@pytest.mark.parametrize("cmd", ["fit-gm", "fit-ls", "pca"])
def test_simple_commands(cmd, tmp_path):
    assert main([cmd, *BASE, "--output", str(tmp_path), "--format", "json"]) == 0
    out = list(tmp_path.iterdir())
    assert len(out) == 1
    assert json.loads(out[0].read_text())


def test_fit_rk_and_bounds(tmp_path, capsys):
    assert main(["fit-rk", *BASE, "--iterations", "2000", "--step-size", "0.5"]) == 0
    assert "intercept" in capsys.readouterr().out
    assert main(["bounds", *BASE, "--iterations", "10,1000", "--eps", "1.0"]) == 0
    text = capsys.readouterr().out
    assert "theorem1" in text and "prescribed" in text


def test_experiment_writes_results(tmp_path):
    args = ["experiment", *BASE, "--step-size", "0.3", "--iterations", "100,1000", "--replicates", "2",
            "--output", str(tmp_path), "--format", "md"]
    assert main(args) == 0
    assert (tmp_path / "results.csv").read_text().startswith("method,sampler,step_size,iterations")
    assert "LDA-GM" in (tmp_path / "summary.md").read_text()


def test_exit_codes(tmp_path):
    assert main(["fit-gm", "--data", str(tmp_path / "none.csv"), "--label-col", "y",
                 "--positive-class", "1"]) == 4
    assert main(["experiment", *BASE, "--replicates", "0", "--output", str(tmp_path)]) == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("a,y\n1,1\n1,1\n1,2\n1,2\n")
    assert main(["fit-gm", "--data", str(bad), "--label-col", "y", "--positive-class", "2",
                 "--split", "1.0"]) == 3
