"""Desk-scale benchmark harness: missing/outsider grid and theta sweep.

All randomness derives from one master seed through per-cell and
per-instance spawn keys, so reports are bit-identical across runs. Wall
clock is only included on request because it would break that guarantee;
explored-node counts are the machine-independent effort measure.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import (
    OUTSIDER_CODE,
    Assignment,
    assignment_from_obj,
    load_assignment,
    load_prediction_matrix,
)
from .dp import solve_batch
from .errors import ConfigError, InfeasibleError
from .graph import CutPolicy, plan_layers, predict_graph_size
from .metrics import evaluate
from .solver import solve_matrix
from .synthetic import ScorerModel, random_truth, synthesize, synthesize_rows, true_classes

DEFAULT_MISSING = tuple(range(8))
DEFAULT_OUTSIDERS = tuple(range(4))
DEFAULT_THETAS = (0.0, 0.01, 0.05)


@dataclass(frozen=True)
class BenchConfig:
    missing: tuple[int, ...] = DEFAULT_MISSING
    outsiders: tuple[int, ...] = DEFAULT_OUTSIDERS
    thetas: tuple[float, ...] = DEFAULT_THETAS
    n_puzzles: int = 200
    accuracy: float = 0.65
    confusion: str = "dirichlet"
    seed: int = 0
    theta: float = 0.05
    allow_empties: bool = True
    matrix_dir: str | None = None
    sweep_missing: int = 0
    sweep_outsiders: int = 8
    sweep_n: int = 5
    include_times: bool = False

    def __post_init__(self):
        if self.n_puzzles < 1 or self.sweep_n < 1:
            raise ConfigError("n_puzzles and sweep_n must be >= 1")
        if any(not 0 <= m <= 7 for m in self.missing):
            raise ConfigError(f"missing counts must be in 0..7, got {self.missing}")
        if any(o < 0 for o in self.outsiders):
            raise ConfigError(f"outsider counts must be >= 0, got {self.outsiders}")

    def scorer(self) -> ScorerModel:
        return ScorerModel(accuracy=self.accuracy, confusion=self.confusion, seed=self.seed)


def config_from_obj(obj: dict) -> BenchConfig:
    if not isinstance(obj, dict):
        raise ConfigError("bench config: expected a JSON object")
    kwargs = {}
    for key in (
        "missing", "outsiders", "thetas", "n_puzzles", "accuracy", "confusion",
        "seed", "theta", "allow_empties", "matrix_dir", "sweep_missing",
        "sweep_outsiders", "sweep_n", "include_times",
    ):
        if key in obj:
            value = obj[key]
            kwargs[key] = tuple(value) if isinstance(value, list) else value
    return BenchConfig(**kwargs)


def config_to_obj(config: BenchConfig) -> dict:
    return {
        "missing": list(config.missing),
        "outsiders": list(config.outsiders),
        "thetas": list(config.thetas),
        "n_puzzles": config.n_puzzles,
        "accuracy": config.accuracy,
        "confusion": config.confusion,
        "seed": config.seed,
        "theta": config.theta,
        "allow_empties": config.allow_empties,
        "matrix_dir": config.matrix_dir,
        "sweep_missing": config.sweep_missing,
        "sweep_outsiders": config.sweep_outsiders,
        "sweep_n": config.sweep_n,
        "include_times": config.include_times,
    }


def _cell_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=key))


def _assignment_from_codes(fragments: list[int], codes: np.ndarray) -> Assignment:
    placements = {f: int(c) for f, c in zip(fragments, codes)}
    used = {c for c in placements.values() if c != OUTSIDER_CODE}
    empties = frozenset(c for c in range(1, 9) if c not in used)
    return Assignment(center=0, placements=placements, empties=empties)


def _mean_explored(truths, rows, config) -> float:
    from .core import make_matrix

    total = 0
    policy = CutPolicy(theta=config.theta, reorder=True)
    for truth, probs in zip(truths, rows):
        fragments, _ = true_classes(truth)
        matrix = make_matrix(0, [(f, [float(p) for p in probs[i]]) for i, f in enumerate(fragments)])
        plan = plan_layers(matrix, True, config.allow_empties, policy)
        nodes, _, _ = predict_graph_size(plan)
        total += nodes - 2
    return total / len(truths)


def _solve_cell(truths, rows, config):
    """Batch-solve one cell; instances infeasible at theta fall back to theta=0."""
    costs, codes = solve_batch(
        rows, theta=config.theta, allow_outsiders=True, allow_empties=config.allow_empties
    )
    fallbacks = np.nonzero(~np.isfinite(costs))[0]
    if len(fallbacks):
        costs_fb, codes_fb = solve_batch(
            rows[fallbacks], theta=0.0, allow_outsiders=True, allow_empties=config.allow_empties
        )
        costs[fallbacks] = costs_fb
        codes[fallbacks] = codes_fb
    return costs, codes, len(fallbacks)


def run_grid(config: BenchConfig) -> dict:
    """Perfect/almost/well-placed rates per (missing, outsiders) cell."""
    if config.matrix_dir is not None:
        return _run_grid_external(config)

    model = config.scorer()
    cells = []
    for m in config.missing:
        for o in config.outsiders:
            t0 = time.perf_counter()
            rng = _cell_rng(config.seed, 1, m, o)
            truths = [random_truth(rng, n_missing=m, n_outsiders=o) for _ in range(config.n_puzzles)]
            classes = np.stack([true_classes(t)[1] for t in truths])
            rows = synthesize_rows(classes, model, rng)
            costs, codes, fallbacks = _solve_cell(truths, rows, config)

            perfect = almost = 0
            well_placed = 0.0
            for i, truth in enumerate(truths):
                fragments, _ = true_classes(truth)
                report = evaluate(_assignment_from_codes(fragments, codes[i]), truth)
                perfect += report.perfect
                almost += report.almost_perfect
                well_placed += report.well_placed_fraction

            cell = {
                "missing": m,
                "outsiders": o,
                "n": config.n_puzzles,
                "perfect_rate": perfect / config.n_puzzles,
                "almost_perfect_rate": almost / config.n_puzzles,
                "well_placed_fraction": well_placed / config.n_puzzles,
                "mean_explored_nodes": _mean_explored(truths, rows, config),
                "theta_fallbacks": fallbacks,
                "skipped": None,
            }
            if config.include_times:
                cell["wall_time"] = time.perf_counter() - t0
            cells.append(cell)

    return {
        "kind": "grid",
        "config": config_to_obj(config),
        "almost_is_perfect_fallback": True,
        "cells": cells,
    }


def _run_grid_external(config: BenchConfig) -> dict:
    """Grid over pre-scored instances: <name>.matrix.json + <name>.truth.json."""
    root = Path(config.matrix_dir)
    pairs = sorted(root.glob("*.matrix.json"))
    grouped: dict[tuple[int, int], list] = {}
    for matrix_path in pairs:
        truth_path = matrix_path.with_name(matrix_path.name.replace(".matrix.json", ".truth.json"))
        if not truth_path.exists():
            raise ConfigError(f"{matrix_path.name} has no matching truth file")
        matrix = load_prediction_matrix(matrix_path.read_text(encoding="utf-8"))
        truth = load_assignment(truth_path.read_text(encoding="utf-8"))
        m = len(truth.empties)
        o = len(truth.outsiders())
        grouped.setdefault((m, o), []).append((matrix, truth))

    cells = []
    for m in config.missing:
        for o in config.outsiders:
            group = grouped.get((m, o), [])
            if not group:
                cells.append({
                    "missing": m, "outsiders": o, "n": 0,
                    "perfect_rate": None, "almost_perfect_rate": None,
                    "well_placed_fraction": None, "mean_explored_nodes": None,
                    "theta_fallbacks": 0,
                    "skipped": "no external instances for this cell",
                })
                continue
            perfect = almost = 0
            well_placed = 0.0
            explored = 0
            fallbacks = 0
            for matrix, truth in group:
                policy = CutPolicy(theta=config.theta, reorder=True)
                try:
                    sol = solve_matrix(matrix, True, config.allow_empties, policy)
                except InfeasibleError:
                    sol = solve_matrix(matrix, True, config.allow_empties, CutPolicy(theta=0.0))
                    fallbacks += 1
                report = evaluate(sol.assignment, truth)
                perfect += report.perfect
                almost += report.almost_perfect
                well_placed += report.well_placed_fraction
                explored += sol.stats.explored_nodes
            n = len(group)
            cells.append({
                "missing": m, "outsiders": o, "n": n,
                "perfect_rate": perfect / n,
                "almost_perfect_rate": almost / n,
                "well_placed_fraction": well_placed / n,
                "mean_explored_nodes": explored / n,
                "theta_fallbacks": fallbacks,
                "skipped": None,
            })
    return {
        "kind": "grid",
        "config": config_to_obj(config),
        "almost_is_perfect_fallback": True,
        "cells": cells,
    }


def run_theta_sweep(config: BenchConfig) -> dict:
    """Cost, accuracy and explored-node deltas across cut thresholds."""
    model = config.scorer()
    instances = []
    for i in range(config.sweep_n):
        rng = _cell_rng(config.seed, 2, i)
        truth = random_truth(rng, n_missing=config.sweep_missing, n_outsiders=config.sweep_outsiders)
        instances.append((truth, synthesize(truth, model, rng)))

    thetas = list(config.thetas)
    baseline = {}
    per_theta = []
    monotone = True
    for theta in sorted(set([0.0] + thetas)):
        policy = CutPolicy(theta=theta, reorder=True)
        costs, explored, perfect, infeasible = [], [], 0, 0
        t0 = time.perf_counter()
        for idx, (truth, matrix) in enumerate(instances):
            try:
                sol = solve_matrix(matrix, True, config.allow_empties, policy)
            except InfeasibleError:
                # The cut killed every complete path; the nodes explored on
                # the way are still a meaningful effort measure.
                infeasible += 1
                costs.append(None)
                plan = plan_layers(matrix, True, config.allow_empties, policy)
                explored.append(predict_graph_size(plan)[0] - 2)
                continue
            costs.append(sol.cost)
            explored.append(sol.stats.explored_nodes)
            perfect += evaluate(sol.assignment, truth).perfect
        wall = time.perf_counter() - t0
        if theta == 0.0:
            baseline = {"costs": costs, "explored": explored}
        solved = [c for c in costs if c is not None]
        deltas = [
            c - c0
            for c, c0 in zip(costs, baseline["costs"])
            if c is not None and c0 is not None
        ]
        monotone &= all(d >= -1e-9 for d in deltas)
        ratio = None
        if baseline.get("explored"):
            ratio = sum(explored) / sum(baseline["explored"])
        entry = {
            "theta": theta,
            "solved": len(solved),
            "infeasible": infeasible,
            "mean_cost_delta": (sum(deltas) / len(deltas)) if deltas else None,
            "max_cost_delta": max(deltas) if deltas else None,
            "perfect_rate": perfect / config.sweep_n,
            "mean_explored_nodes": sum(explored) / len(explored),
            "explored_ratio_vs_theta0": ratio,
        }
        if config.include_times:
            entry["wall_time"] = wall
        if theta in thetas:
            per_theta.append(entry)
    return {
        "kind": "theta_sweep",
        "config": config_to_obj(config),
        "instances": config.sweep_n,
        "cost_monotone": bool(monotone),
        "per_theta": per_theta,
    }


def grid_to_csv(report: dict, metric: str = "almost_perfect_rate") -> str:
    """Rows are missing counts, columns are outsider counts."""
    cells = {(c["missing"], c["outsiders"]): c for c in report["cells"]}
    missing = sorted({c["missing"] for c in report["cells"]})
    outsiders = sorted({c["outsiders"] for c in report["cells"]})
    lines = ["missing/outsiders," + ",".join(str(o) for o in outsiders)]
    for m in missing:
        row = [str(m)]
        for o in outsiders:
            value = cells.get((m, o), {}).get(metric)
            row.append("" if value is None else f"{value:.4f}")
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"
