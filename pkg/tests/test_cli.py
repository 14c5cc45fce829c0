import json
import math

import pytest

from slitplane.cli import main


def run(args):
    return main(args)


def test_sample_deterministic_bytes(tmp_path):
    out = tmp_path / "plane.json"
    assert run(["sample", "--lambda", "4", "--radius", "1", "--seed", "42",
                "--out", str(out)]) == 0
    first = out.read_bytes()
    assert run(["sample", "--lambda", "4", "--radius", "1", "--seed", "42",
                "--out", str(out)]) == 0
    assert out.read_bytes() == first
    doc = json.loads(first)
    assert doc["format_version"] == 1
    assert doc["config"]["seed"] == 42


def test_visible_from_root_and_planted_cone(tmp_path):
    plane = tmp_path / "plane.json"
    assert run(["sample", "--lambda", "4", "--radius", "1.6", "--seed", "3",
                "--plant", "uniform", "--out", str(plane)]) == 0
    out = tmp_path / "vis.json"
    assert run(["visible", "--plane", str(plane), "--radius", "0.5",
                "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["count"] == len(doc["singularities"])
    out2 = tmp_path / "vis2.json"
    assert run(["visible", "--plane", str(plane), "--radius", "0.5",
                "--from", "-1", "--out", str(out2)]) == 0
    doc2 = json.loads(out2.read_text())
    assert doc2["config"]["viewpoint"] == "-1"


def test_ball_subcommand(tmp_path):
    plane = tmp_path / "plane.json"
    run(["sample", "--lambda", "4", "--radius", "1.0", "--seed", "5",
         "--out", str(plane)])
    out = tmp_path / "ball.json"
    assert run(["ball", "--plane", str(plane), "--radius", "0.4",
                "--qmc-points", "4000", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["area_estimate"] > math.pi * 0.16 * 0.9
    assert doc["area_standard_error"] >= 0.0


def test_mc_subcommand_with_csv(tmp_path):
    out = tmp_path / "mc.json"
    csv = tmp_path / "hist.csv"
    assert run(["mc", "--experiment", "visible-count", "--from", "regular",
                "--lambda", "4", "--radius", "0.4", "--trials", "100",
                "--seed", "6", "--out", str(out), "--hist-csv", str(csv)]) == 0
    doc = json.loads(out.read_text())
    assert doc["kind"] == "mc_report"
    assert doc["seeds"] == {"base": 6, "scheme": "blake2b(base,i)", "trials": 100}
    assert csv.read_text().startswith("count,frequency\n")


def test_sts_build_and_injrad(tmp_path, capsys):
    sts = tmp_path / "sts.json"
    assert run(["sts", "build", "--n", "3", "--hperm", "(1 2)",
                "--vperm", "(1 3)", "--out", str(sts)]) == 0
    doc = json.loads(sts.read_text())
    assert doc["derived"]["genus"] == 2
    assert doc["derived"]["cone_orders"] == [2]
    out = tmp_path / "injrad.json"
    assert run(["injrad", "--sts", str(sts), "--cone", "0", "--rmax", "2",
                "--out", str(out)]) == 0
    assert json.loads(out.read_text())["injectivity_radius"] == pytest.approx(0.5)


def test_sts_random_prints_measure_caveat(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert run(["sts", "random", "--squares", "6", "--seed", "9",
                "--out", str(out)]) == 0
    captured = capsys.readouterr()
    assert "not the natural" in captured.err
    assert run(["sts", "random", "--squares", "6", "--seed", "9",
                "--out", str(out)]) == 0  # determinism
    again = out.read_bytes()
    run(["sts", "random", "--squares", "6", "--seed", "9", "--out", str(out)])
    assert out.read_bytes() == again


def test_render_svg(tmp_path):
    plane = tmp_path / "plane.json"
    run(["sample", "--lambda", "4", "--radius", "1.0", "--seed", "8",
         "--out", str(plane)])
    svg = tmp_path / "atlas.svg"
    assert run(["render", "--plane", str(plane), "--radius", "0.8",
                "--out", str(svg)]) == 0
    text = svg.read_text()
    assert text.startswith("<svg")
    assert "<path" in text


def test_usage_error_exit_code(capsys):
    assert run(["mc", "--experiment", "bogus"]) == 1
    assert "usage" in capsys.readouterr().err


def test_geometric_failure_exit_code(tmp_path, capsys):
    plane = tmp_path / "plane.json"
    run(["sample", "--lambda", "4", "--radius", "0.5", "--seed", "1",
         "--out", str(plane)])
    # querying beyond the sampled budget is an expansion failure
    assert run(["visible", "--plane", str(plane), "--radius", "2.0",
                "--out", "-"]) == 2
    assert "error" in capsys.readouterr().err
