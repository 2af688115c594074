"""Shortest-path solving and the unknown-center meta-procedure."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .core import Assignment, GraphStats, OUTSIDER_CODE, PredictionMatrix, assignment_to_obj
from .dp import MAX_FAST_LAYERS, solve_planned
from .errors import DomainError, InfeasibleError
from .graph import (
    DEFAULT_NODE_BUDGET,
    CutPolicy,
    ReassemblyGraph,
    _suggest_theta,
    build_graph,
    plan_layers,
    predict_graph_size,
)

ENGINES = ("auto", "graph", "dp")


@dataclass
class Solution:
    """An optimal reassembly with its cost and effort counters."""

    assignment: Assignment
    cost: float
    probability: float
    stats: GraphStats
    center_hypothesis: int

    def to_obj(self, include_times: bool = False) -> dict:
        return {
            "assignment": assignment_to_obj(self.assignment),
            "center_hypothesis": self.center_hypothesis,
            "cost": self.cost,
            "probability": self.probability,
            "stats": self.stats.to_obj(include_times),
        }


def _finish(plan, codes, cost, stats) -> Solution:
    placements = {plan.order[k]: int(codes[k]) for k in range(plan.f)}
    used = {c for c in placements.values() if c != OUTSIDER_CODE}
    empties = frozenset(c for c in plan.positions if c not in used)
    assignment = Assignment(center=plan.center, placements=placements, empties=empties)
    # exp(-cost) underflows for extreme costs; clamp to the smallest positive float
    probability = max(math.exp(-cost), 5e-324)
    return Solution(
        assignment=assignment,
        cost=cost,
        probability=probability,
        stats=stats,
        center_hypothesis=plan.center,
    )


def solve(graph: ReassemblyGraph) -> Solution:
    """Minimum-weight complete path of a materialized graph.

    Among equal-cost paths the lexicographically smallest decision sequence
    wins; leaves are stored in that order, so the first minimum is it.
    """
    t0 = time.perf_counter()
    if graph.path_count == 0:
        raise InfeasibleError("graph has no complete path")
    dist = graph.complete_weights()
    leaf = graph.complete[int(np.argmin(dist))]
    codes = graph.path_codes(np.array([leaf]))[0]
    cost = float(graph.layers[-1].dist[leaf])
    stats = GraphStats(**vars(graph.stats))
    stats.solve_time = time.perf_counter() - t0
    return _finish(graph.plan, codes, cost, stats)


def solve_matrix(
    matrix: PredictionMatrix,
    allow_outsiders: bool = True,
    allow_empties: bool = True,
    policy: CutPolicy = CutPolicy(),
    positions: tuple[int, ...] | None = None,
    engine: str = "auto",
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> Solution:
    """Solve one prediction matrix end to end.

    The "dp" engine merges equal partial states and never materializes the
    tree; "graph" builds it explicitly. Both are exact and return identical
    solutions (size counters included); "auto" picks dp whenever the depth
    allows it.
    """
    if engine not in ENGINES:
        raise DomainError(f"engine must be one of {ENGINES}, got {engine!r}")
    if engine == "auto":
        engine = "dp" if matrix.f <= MAX_FAST_LAYERS else "graph"

    if engine == "graph":
        graph = build_graph(matrix, allow_outsiders, allow_empties, policy, positions, node_budget)
        return solve(graph)

    t0 = time.perf_counter()
    plan = plan_layers(matrix, allow_outsiders, allow_empties, policy, positions)
    nodes, edges, complete = predict_graph_size(plan)
    build_time = time.perf_counter() - t0
    t1 = time.perf_counter()
    result = solve_planned(plan)
    if result is None:
        raise InfeasibleError(
            f"no complete path survives at theta={plan.theta}",
            suggested_theta=_suggest_theta(matrix, allow_outsiders, allow_empties, positions),
        )
    cost, codes = result
    stats = GraphStats(
        nodes=nodes,
        edges=edges,
        explored_nodes=nodes - 2,
        rescued_layers=plan.rescued_layers,
        build_time=build_time,
        solve_time=time.perf_counter() - t1,
    )
    return _finish(plan, codes, cost, stats)


def solve_unknown_center(
    matrices: list[PredictionMatrix],
    allow_outsiders: bool = True,
    allow_empties: bool = True,
    policy: CutPolicy = CutPolicy(),
    engine: str = "auto",
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> Solution:
    """Try every center hypothesis and keep the cheapest solution.

    Each matrix conditions on a different candidate center; ties go to the
    smallest center id. The stats of the returned solution accumulate the
    effort of every hypothesis that was solved.
    """
    if not matrices:
        raise DomainError("at least one center hypothesis is required")
    centers = [m.center for m in matrices]
    if len(set(centers)) != len(centers):
        raise DomainError(f"duplicate center hypotheses: {sorted(centers)}")
    ids = {matrices[0].center} | set(matrices[0].fragments)
    for mat in matrices:
        if {mat.center} | set(mat.fragments) != ids:
            raise DomainError("every hypothesis must cover the same fragment set")

    best: Solution | None = None
    totals = GraphStats()
    failures: list[str] = []
    for mat in sorted(matrices, key=lambda m: m.center):
        try:
            sol = solve_matrix(mat, allow_outsiders, allow_empties, policy, None, engine, node_budget)
        except InfeasibleError as err:
            failures.append(f"center {mat.center}: {err}")
            continue
        totals.nodes += sol.stats.nodes
        totals.edges += sol.stats.edges
        totals.explored_nodes += sol.stats.explored_nodes
        totals.rescued_layers += sol.stats.rescued_layers
        totals.build_time += sol.stats.build_time
        totals.solve_time += sol.stats.solve_time
        if best is None or sol.cost < best.cost:
            best = sol
    if best is None:
        raise InfeasibleError("every center hypothesis is infeasible: " + "; ".join(failures))
    best.stats = totals
    return best
