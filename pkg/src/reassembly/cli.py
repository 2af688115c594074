"""Command-line client over the core package.

Every command is a thin wrapper: parse arguments, call the library, write
canonical JSON. Outputs are bit-identical across runs for a fixed seed.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from . import bench as bench_mod
from .core import dump_json, load_assignment, load_instance, load_prediction_matrix
from .counting import GraphSizeQuery, edge_count, node_count, reassembly_lower_bound
from .errors import PuzzleError
from .fragmenter import FragmentationSpec, fragment_image, load_fragment_pixels, load_image, write_outputs
from .graph import CutPolicy, build_graph, dump_edges
from .metrics import DEFAULT_TAU, evaluate
from .solver import ENGINES, solve, solve_matrix, solve_unknown_center
from .synthetic import CONFUSIONS, ScorerModel, synthesize


def _friendly(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except PuzzleError as err:
            raise click.ClickException(str(err)) from err
    return wrapper


def _write(text: str, output: str | None):
    if output is None or output == "-":
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8")


@click.group()
def main():
    """Solve, score and benchmark eroded 3x3 jigsaw puzzles."""


@main.command()
@click.option("--fragments", "-f", type=int, required=True, help="Number of lateral fragments.")
@click.option("--positions", "-p", type=int, required=True, help="Number of available positions (0-8).")
@click.option("--outsiders", is_flag=True, help="Allow the outsider class in the lower bound.")
@_friendly
def count(fragments, positions, outsiders):
    """Closed-form graph size and reassembly lower bound."""
    query = GraphSizeQuery(fragments, positions)
    click.echo(dump_json({
        "fragments": fragments,
        "positions": positions,
        "nodes": node_count(query),
        "edges": edge_count(query),
        "lower_bound": reassembly_lower_bound(fragments, positions, outsiders),
    }), nl=False)


@main.command(name="solve")
@click.option("--matrix", type=click.Path(exists=True, dir_okay=False), help="Prediction-matrix JSON file.")
@click.option("--unknown-center", type=click.Path(exists=True, file_okay=False),
              help="Directory of per-hypothesis matrix files (*.json).")
@click.option("--theta", type=float, default=0.05, show_default=True, help="Branch-cut threshold.")
@click.option("--no-outsiders", is_flag=True, help="Ignore the outsider class (renormalizes rows).")
@click.option("--no-empties", is_flag=True, help="Require every position to be filled.")
@click.option("--no-reorder", is_flag=True, help="Keep the matrix row order as the layer order.")
@click.option("--engine", type=click.Choice(ENGINES), default="auto", show_default=True)
@click.option("--node-budget", type=int, default=None, help="Abort if the graph would exceed this many nodes.")
@click.option("--timings", is_flag=True, help="Include wall-clock times (not run-deterministic).")
@click.option("--dump-graph", type=click.Path(dir_okay=False), help="Write the edge list as JSON lines (graph engine).")
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None, help="Solution file (default stdout).")
@_friendly
def solve_cmd(matrix, unknown_center, theta, no_outsiders, no_empties, no_reorder,
              engine, node_budget, timings, dump_graph, output):
    """Most probable reassembly for one matrix or nine center hypotheses."""
    if (matrix is None) == (unknown_center is None):
        raise click.UsageError("exactly one of --matrix or --unknown-center is required")
    policy = CutPolicy(theta=theta, reorder=not no_reorder)
    kwargs = dict(
        allow_outsiders=not no_outsiders,
        allow_empties=not no_empties,
        policy=policy,
    )
    if node_budget is not None:
        kwargs["node_budget"] = node_budget

    if unknown_center is not None:
        files = sorted(Path(unknown_center).glob("*.json"))
        if not files:
            raise click.ClickException(f"no matrix files in {unknown_center}")
        matrices = [load_prediction_matrix(f.read_text(encoding="utf-8")) for f in files]
        solution = solve_unknown_center(matrices, engine=engine, **kwargs)
    else:
        mat = load_prediction_matrix(Path(matrix).read_text(encoding="utf-8"))
        if dump_graph:
            graph = build_graph(mat, **kwargs)
            with open(dump_graph, "w", encoding="utf-8") as fh:
                for edge in dump_edges(graph):
                    fh.write(json.dumps(edge, sort_keys=True) + "\n")
            solution = solve(graph)
        else:
            solution = solve_matrix(mat, engine=engine, **kwargs)
    _write(dump_json(solution.to_obj(include_times=timings)), output)


@main.command(name="eval")
@click.option("--solution", type=click.Path(exists=True, dir_okay=False), required=True,
              help="Solution or assignment JSON file.")
@click.option("--truth", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--fragments", type=click.Path(file_okay=False), default=None,
              help="Directory with frag_<id>.png and instance.json for the almost-perfect metric.")
@click.option("--tau", type=float, default=DEFAULT_TAU, show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
@_friendly
def eval_cmd(solution, truth, fragments, tau, output):
    """Score a reassembly against the ground truth."""
    sol_obj = json.loads(Path(solution).read_text(encoding="utf-8"))
    from .core import assignment_from_obj

    predicted = assignment_from_obj(sol_obj["assignment"] if "assignment" in sol_obj else sol_obj)
    truth_asg = load_assignment(Path(truth).read_text(encoding="utf-8"))
    pixels = None
    if fragments is not None:
        instance = load_instance((Path(fragments) / "instance.json").read_text(encoding="utf-8"))
        pixels = load_fragment_pixels(fragments, instance)
    report = evaluate(predicted, truth_asg, pixels=pixels, tau=tau)
    _write(dump_json(report.to_obj()), output)


@main.command()
@click.option("--image", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--out", type=click.Path(file_okay=False), required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--missing", type=int, default=0, show_default=True)
@click.option("--outsiders", type=int, default=0, show_default=True)
@click.option("--outsider-src", type=click.Path(exists=True, dir_okay=False), multiple=True)
@click.option("--multi-per-source", is_flag=True, help="Allow several outsiders from one source image.")
@_friendly
def fragment(image, out, seed, missing, outsiders, outsider_src, multi_per_source):
    """Cut an image into a puzzle: fragment PNGs, truth.json, instance.json."""
    spec = FragmentationSpec(
        seed=seed,
        n_missing=missing,
        n_outsiders=outsiders,
        outsider_source=tuple(outsider_src),
        multi_per_source=multi_per_source,
    )
    result = fragment_image(load_image(image), spec)
    write_outputs(result, out)
    click.echo(f"wrote {len(result.pixels)} fragments to {out}")


@main.command()
@click.option("--truth", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--accuracy", type=float, default=0.65, show_default=True)
@click.option("--confusion", type=click.Choice(CONFUSIONS), default="dirichlet", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
@_friendly
def synth(truth, accuracy, confusion, seed, output):
    """Synthesize a calibrated prediction matrix from a ground truth."""
    truth_asg = load_assignment(Path(truth).read_text(encoding="utf-8"))
    model = ScorerModel(accuracy=accuracy, confusion=confusion, seed=seed)
    matrix = synthesize(truth_asg, model)
    from .core import dump_prediction_matrix

    _write(dump_prediction_matrix(matrix), output)


@main.group()
def bench():
    """Benchmark harness."""


def _load_config(path: str | None) -> bench_mod.BenchConfig:
    if path is None:
        return bench_mod.BenchConfig()
    return bench_mod.config_from_obj(json.loads(Path(path).read_text(encoding="utf-8")))


@bench.command()
@click.option("--config", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
@click.option("--csv", type=click.Path(dir_okay=False), default=None,
              help="Also write the grid as CSV (rows=missing, columns=outsiders).")
@click.option("--csv-metric", default="almost_perfect_rate", show_default=True)
@_friendly
def grid(config, output, csv, csv_metric):
    """Missing x outsiders benchmark grid."""
    report = bench_mod.run_grid(_load_config(config))
    _write(dump_json(report), output)
    if csv:
        Path(csv).write_text(bench_mod.grid_to_csv(report, csv_metric), encoding="utf-8")


@bench.command()
@click.option("--config", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
@_friendly
def theta(config, output):
    """Cut-threshold sweep: cost, accuracy and explored-node deltas."""
    report = bench_mod.run_theta_sweep(_load_config(config))
    _write(dump_json(report), output)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("reassembly.service.app:app", host=host, port=port)


if __name__ == "__main__":
    main()
