import json
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner
from PIL import Image

from conftest import structured_image
from reassembly.cli import main
from reassembly.core import dump_json, dump_prediction_matrix, assignment_to_obj
from reassembly.synthetic import ScorerModel, random_truth, synthesize, synthesize_unknown_center


@pytest.fixture
def runner():
    return CliRunner()


def run_ok(runner, args):
    result = runner.invoke(main, args, catch_exceptions=False)
    assert result.exit_code == 0, result.output
    return result


def write_instance(tmp_path, rng, seed=1, missing=0, outsiders=0):
    truth = random_truth(rng, n_missing=missing, n_outsiders=outsiders)
    matrix = synthesize(truth, ScorerModel(accuracy=0.8, seed=seed), rng)
    matrix_path = tmp_path / "matrix.json"
    truth_path = tmp_path / "truth.json"
    matrix_path.write_text(dump_prediction_matrix(matrix))
    truth_path.write_text(dump_json(assignment_to_obj(truth)))
    return matrix_path, truth_path


def test_count_command(runner):
    result = run_ok(runner, ["count", "-f", "8", "-p", "8"])
    payload = json.loads(result.output)
    assert payload["nodes"] == 1952458
    assert payload["lower_bound"] == 40320


def test_count_outsiders_flag(runner):
    result = run_ok(runner, ["count", "-f", "10", "-p", "8", "--outsiders"])
    assert json.loads(result.output)["lower_bound"] == 6652800


def test_solve_and_eval_cycle(runner, tmp_path, rng):
    matrix_path, truth_path = write_instance(tmp_path, rng)
    out = tmp_path / "solution.json"
    run_ok(runner, ["solve", "--matrix", str(matrix_path), "--theta", "0", "-o", str(out)])
    solution = json.loads(out.read_text())
    assert set(solution) == {"assignment", "center_hypothesis", "cost", "probability", "stats"}
    report_out = tmp_path / "report.json"
    run_ok(runner, ["eval", "--solution", str(out), "--truth", str(truth_path), "-o", str(report_out)])
    report = json.loads(report_out.read_text())
    assert set(report) == {"perfect", "well_placed_fraction", "almost_perfect", "per_position"}


def test_solve_deterministic(runner, tmp_path, rng):
    matrix_path, _ = write_instance(tmp_path, rng)
    outputs = []
    for name in ("a.json", "b.json"):
        out = tmp_path / name
        run_ok(runner, ["solve", "--matrix", str(matrix_path), "-o", str(out)])
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]


def test_solve_infeasible_is_clean_error(runner, tmp_path, rng):
    matrix_path, _ = write_instance(tmp_path, rng)
    result = runner.invoke(main, ["solve", "--matrix", str(matrix_path), "--theta", "1.0"])
    assert result.exit_code != 0
    assert "feasible again" in result.output


def test_solve_unknown_center_dir(runner, tmp_path, rng):
    truth = random_truth(rng)
    hypo_dir = tmp_path / "hypo"
    hypo_dir.mkdir()
    for m in synthesize_unknown_center(truth, ScorerModel(accuracy=0.95, seed=3), rng):
        (hypo_dir / f"center_{m.center}.json").write_text(dump_prediction_matrix(m))
    out = tmp_path / "solution.json"
    run_ok(runner, ["solve", "--unknown-center", str(hypo_dir), "--theta", "0", "--no-outsiders", "-o", str(out)])
    solution = json.loads(out.read_text())
    assert 0 <= solution["center_hypothesis"] <= 8


def test_solve_dump_graph(runner, tmp_path, rng):
    matrix_path, _ = write_instance(tmp_path, rng, missing=5)
    dump = tmp_path / "edges.jsonl"
    run_ok(runner, ["solve", "--matrix", str(matrix_path), "--theta", "0.05", "--dump-graph", str(dump), "-o", str(tmp_path / "s.json")])
    lines = [json.loads(line) for line in dump.read_text().splitlines()]
    assert lines and all({"from", "to", "fragment", "position", "prob", "weight"} == set(e) for e in lines)


def test_fragment_synth_solve_eval_end_to_end(runner, tmp_path, rng):
    img = tmp_path / "img.png"
    Image.fromarray(structured_image(rng)).save(img)
    out_dir = tmp_path / "puzzle"
    run_ok(runner, ["fragment", "--image", str(img), "--out", str(out_dir), "--seed", "5", "--missing", "1"])
    assert (out_dir / "truth.json").exists() and (out_dir / "instance.json").exists()
    assert len(list(out_dir.glob("frag_*.png"))) == 8

    matrix_path = tmp_path / "matrix.json"
    run_ok(runner, ["synth", "--truth", str(out_dir / "truth.json"), "--accuracy", "1.0", "--seed", "2", "-o", str(matrix_path)])
    solution_path = tmp_path / "solution.json"
    run_ok(runner, ["solve", "--matrix", str(matrix_path), "--theta", "0", "-o", str(solution_path)])
    report_path = tmp_path / "report.json"
    run_ok(runner, [
        "eval", "--solution", str(solution_path), "--truth", str(out_dir / "truth.json"),
        "--fragments", str(out_dir), "-o", str(report_path),
    ])
    report = json.loads(report_path.read_text())
    assert report["perfect"] and report["almost_perfect"] and report["well_placed_fraction"] == 1.0


def test_fragment_deterministic(runner, tmp_path, rng):
    img = tmp_path / "img.png"
    Image.fromarray(structured_image(rng)).save(img)
    digests = []
    for d in ("p1", "p2"):
        out_dir = tmp_path / d
        run_ok(runner, ["fragment", "--image", str(img), "--out", str(out_dir), "--seed", "9"])
        digests.append(sorted((f.name, f.read_bytes()) for f in out_dir.iterdir()))
    assert digests[0] == digests[1]


def test_synth_deterministic(runner, tmp_path, rng):
    _, truth_path = write_instance(tmp_path, rng)
    outs = []
    for name in ("m1.json", "m2.json"):
        out = tmp_path / name
        run_ok(runner, ["synth", "--truth", str(truth_path), "--accuracy", "0.65", "--seed", "4", "-o", str(out)])
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_bench_grid_and_theta(runner, tmp_path):
    config = tmp_path / "bench.json"
    config.write_text(json.dumps({
        "missing": [0, 7], "outsiders": [0], "n_puzzles": 10,
        "accuracy": 0.65, "seed": 3, "sweep_n": 2, "thetas": [0.0, 0.05],
    }))
    grid_out = tmp_path / "grid.json"
    csv_out = tmp_path / "grid.csv"
    run_ok(runner, ["bench", "grid", "--config", str(config), "-o", str(grid_out), "--csv", str(csv_out)])
    report = json.loads(grid_out.read_text())
    assert len(report["cells"]) == 2
    assert csv_out.read_text().startswith("missing/outsiders,0")

    theta_out = tmp_path / "theta.json"
    run_ok(runner, ["bench", "theta", "--config", str(config), "-o", str(theta_out)])
    sweep = json.loads(theta_out.read_text())
    assert sweep["cost_monotone"] is True


def test_bench_deterministic(runner, tmp_path):
    config = tmp_path / "bench.json"
    config.write_text(json.dumps({
        "missing": [1], "outsiders": [1], "n_puzzles": 15, "seed": 21, "sweep_n": 2,
    }))
    outs = []
    for name in ("r1.json", "r2.json"):
        out = tmp_path / name
        run_ok(runner, ["bench", "grid", "--config", str(config), "-o", str(out)])
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_bad_matrix_file_is_clean_error(runner, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"center": 0, "rows": [{"fragment": 1, "probs": [0.5, 0.5]}]}')
    result = runner.invoke(main, ["solve", "--matrix", str(bad)])
    assert result.exit_code != 0 and "probs" in result.output
