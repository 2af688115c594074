"""Reassembly decision graph: planning, exact size prediction, building.

The graph is a layered tree of partial assignments rooted at a source S,
with every complete leaf linked to a shared sink T by a zero-weight edge.
Layer k decides where fragment k of the processing order goes: one of the
still-free lateral positions, or the outsider class. Edge weights are
negative log probabilities, so the shortest S-T path is the most probable
complete reassembly.

Because a row's probabilities do not depend on the path prefix, the exact
node/edge totals of the pruned tree can be computed by a small dynamic
program over occupied-position bitmasks without materializing anything;
`predict_graph_size` is that program and doubles as the pre-build budget
check.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    LATERAL_CODES,
    OUTSIDER_CODE,
    PROB_FLOOR,
    Assignment,
    GraphStats,
    PredictionMatrix,
)
from .errors import BudgetError, DomainError, InfeasibleError

DEFAULT_NODE_BUDGET = 50_000_000

_POPCOUNT = np.array([bin(i).count("1") for i in range(256)], dtype=np.int64)


def _bit(code: int) -> int:
    return 1 << (code - 1)


@dataclass(frozen=True)
class CutPolicy:
    """Branch-cut threshold on the probability scale, plus row reordering."""

    theta: float = 0.0
    reorder: bool = True

    def __post_init__(self):
        if not 0.0 <= self.theta <= 1.0:
            raise DomainError(f"theta must be in [0, 1], got {self.theta}")


@dataclass
class PlannedLayers:
    """Rows in processing order with cuts already applied.

    ``eff`` holds the effective probabilities (outsider column zeroed and
    laterals renormalized when outsiders are off); ``surviving[k]`` lists
    the codes that keep an edge at layer k, ascending with 9 last.
    """

    center: int
    order: tuple[int, ...]
    eff: np.ndarray        # (f, 9) effective probabilities
    weights: np.ndarray    # (f, 9) -ln(max(p, floor))
    surviving: list[tuple[int, ...]]
    positions: tuple[int, ...]
    allow_outsiders: bool
    allow_empties: bool
    theta: float
    rescued_layers: int = 0

    @property
    def f(self) -> int:
        return len(self.order)

    @property
    def p(self) -> int:
        return len(self.positions)

    @property
    def avail_mask(self) -> int:
        mask = 0
        for c in self.positions:
            mask |= _bit(c)
        return mask

    def weight_of(self, k: int, code: int) -> float:
        return float(self.weights[k, 8 if code == OUTSIDER_CODE else code - 1])

    def prob_of(self, k: int, code: int) -> float:
        return float(self.eff[k, 8 if code == OUTSIDER_CODE else code - 1])


def plan_layers(
    matrix: PredictionMatrix,
    allow_outsiders: bool = True,
    allow_empties: bool = True,
    policy: CutPolicy = CutPolicy(),
    positions: tuple[int, ...] | None = None,
) -> PlannedLayers:
    """Apply the outsider mode, cuts, rescue rule, and row reordering."""
    if positions is None:
        positions = LATERAL_CODES
    positions = tuple(sorted(positions))
    if any(c not in LATERAL_CODES for c in positions):
        raise DomainError(f"positions must be lateral codes 1..8, got {positions}")
    if matrix.f == 0:
        raise DomainError("matrix has no rows")

    eff = np.array(matrix.probs, dtype=np.float64)
    if not allow_outsiders:
        lat = eff[:, :8]
        sums = lat.sum(axis=1, keepdims=True)
        # A pure-outsider row carries no lateral signal; fall back to uniform.
        uniform = np.full_like(lat, 1.0 / 8.0)
        eff[:, :8] = np.where(sums > 0.0, lat / np.where(sums > 0.0, sums, 1.0), uniform)
        eff[:, 8] = 0.0

    lat_cols = [c - 1 for c in positions]
    surviving: list[tuple[int, ...]] = []
    cut_counts: list[int] = []
    rescued = 0
    for i in range(matrix.f):
        keep = [c for c in positions if eff[i, c - 1] >= policy.theta]
        cuts = len(positions) - len(keep)
        if allow_outsiders:
            if eff[i, 8] >= policy.theta:
                keep.append(OUTSIDER_CODE)
            else:
                cuts += 1
        elif not keep:
            # Every lateral edge fell under theta; keep the single best one
            # so the fragment still has somewhere to go.
            best = positions[int(np.argmax(eff[i, lat_cols]))]
            keep = [best]
            rescued += 1
        surviving.append(tuple(keep))
        cut_counts.append(cuts)

    order = list(range(matrix.f))
    if policy.reorder:
        order.sort(key=lambda i: (-cut_counts[i], matrix.fragments[i]))
    eff = np.ascontiguousarray(eff[order])
    weights = -np.log(np.maximum(eff, PROB_FLOOR))
    return PlannedLayers(
        center=matrix.center,
        order=tuple(matrix.fragments[i] for i in order),
        eff=eff,
        weights=weights,
        surviving=[surviving[i] for i in order],
        positions=positions,
        allow_outsiders=allow_outsiders,
        allow_empties=allow_empties,
        theta=policy.theta,
        rescued_layers=rescued,
    )


def _outsider_ok(plan: PlannedLayers, k: int, occupied_count) -> bool | np.ndarray:
    """Whether declaring fragment k an outsider can still fill every position."""
    if plan.allow_empties:
        return True
    remaining = plan.f - k - 1
    return occupied_count + remaining >= plan.p


def predict_graph_size(plan: PlannedLayers) -> tuple[int, int, int]:
    """Exact (nodes, edges, complete_paths) of the pruned tree, S and T included.

    Runs in O(f * 2^p) regardless of how large the tree itself would be.
    """
    counts: dict[int, int] = {0: 1}
    per_layer: list[int] = []
    for k in range(plan.f):
        new: dict[int, int] = {}
        for mask, cnt in counts.items():
            for code in plan.surviving[k]:
                if code == OUTSIDER_CODE:
                    if not _outsider_ok(plan, k, _POPCOUNT[mask]):
                        continue
                    new[mask] = new.get(mask, 0) + cnt
                elif not mask & _bit(code):
                    tgt = mask | _bit(code)
                    new[tgt] = new.get(tgt, 0) + cnt
        per_layer.append(sum(new.values()))
        counts = new
    if plan.allow_empties:
        complete = sum(counts.values())
    else:
        complete = counts.get(plan.avail_mask, 0)
    decision_nodes = sum(per_layer)
    return decision_nodes + 2, decision_nodes + complete, complete


@dataclass
class _Layer:
    parents: np.ndarray  # int64, index into previous layer (0 for layer 0 = S)
    codes: np.ndarray    # int8 position codes
    occ: np.ndarray      # uint8 occupied-position bitmask after the placement
    dist: np.ndarray     # float64 cumulative weight from S


@dataclass
class ReassemblyGraph:
    """Materialized decision tree plus the shared sink."""

    plan: PlannedLayers
    layers: list[_Layer]
    complete: np.ndarray  # indices of last-layer nodes linked to T
    stats: GraphStats = field(default_factory=GraphStats)

    @property
    def path_count(self) -> int:
        return len(self.complete)

    def complete_weights(self) -> np.ndarray:
        """Total weight of every complete path, in enumeration order."""
        return self.layers[-1].dist[self.complete]

    def path_codes(self, leaves: np.ndarray) -> np.ndarray:
        """Backtrack the position-code sequences for the given leaf indices."""
        f = self.plan.f
        codes = np.empty((len(leaves), f), dtype=np.int8)
        idx = np.asarray(leaves, dtype=np.int64)
        for k in range(f - 1, -1, -1):
            codes[:, k] = self.layers[k].codes[idx]
            idx = self.layers[k].parents[idx]
        return codes

    def assignment_for_codes(self, codes: np.ndarray) -> Assignment:
        placements = {self.plan.order[k]: int(codes[k]) for k in range(self.plan.f)}
        used = {c for c in placements.values() if c != OUTSIDER_CODE}
        empties = frozenset(c for c in self.plan.positions if c not in used)
        return Assignment(center=self.plan.center, placements=placements, empties=empties)


def build_graph(
    matrix: PredictionMatrix,
    allow_outsiders: bool = True,
    allow_empties: bool = True,
    policy: CutPolicy = CutPolicy(),
    positions: tuple[int, ...] | None = None,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> ReassemblyGraph:
    """Materialize the pruned decision tree for one prediction matrix.

    Raises InfeasibleError when no complete path survives the cuts and
    BudgetError when the exact predicted size exceeds ``node_budget``.
    """
    import time

    t0 = time.perf_counter()
    plan = plan_layers(matrix, allow_outsiders, allow_empties, policy, positions)
    nodes, edges, complete_total = predict_graph_size(plan)
    if complete_total == 0:
        raise InfeasibleError(
            f"no complete path survives at theta={plan.theta}",
            suggested_theta=_suggest_theta(matrix, allow_outsiders, allow_empties, positions),
        )
    if nodes > node_budget:
        raise BudgetError(nodes, node_budget)

    layers: list[_Layer] = []
    prev_occ = np.zeros(1, dtype=np.uint8)
    prev_dist = np.zeros(1, dtype=np.float64)
    for k in range(plan.f):
        parts_parent, parts_code = [], []
        for code in plan.surviving[k]:
            if code == OUTSIDER_CODE:
                ok = _outsider_ok(plan, k, _POPCOUNT[prev_occ])
                sel = np.nonzero(ok)[0] if isinstance(ok, np.ndarray) else (
                    np.arange(len(prev_occ), dtype=np.int64) if ok else np.empty(0, dtype=np.int64))
            else:
                sel = np.nonzero((prev_occ & _bit(code)) == 0)[0]
            if len(sel):
                parts_parent.append(sel.astype(np.int64))
                parts_code.append(np.full(len(sel), code, dtype=np.int8))
        if not parts_parent:
            raise InfeasibleError(
                f"layer {k} (fragment {plan.order[k]}) has no surviving edges",
                suggested_theta=_suggest_theta(matrix, allow_outsiders, allow_empties, positions),
            )
        parents = np.concatenate(parts_parent)
        codes = np.concatenate(parts_code)
        # Stable sort by parent keeps codes ascending within a parent, so
        # in-layer index order is lexicographic over decision sequences.
        perm = np.argsort(parents, kind="stable")
        parents, codes = parents[perm], codes[perm]
        lateral = codes != OUTSIDER_CODE
        occ = prev_occ[parents] | np.where(
            lateral, np.left_shift(np.uint8(1), np.maximum(codes, 1).astype(np.uint8) - np.uint8(1)), np.uint8(0)
        ).astype(np.uint8)
        cols = np.where(lateral, codes - 1, 8).astype(np.int64)
        dist = prev_dist[parents] + plan.weights[k, cols]
        layers.append(_Layer(parents=parents, codes=codes, occ=occ, dist=dist))
        prev_occ, prev_dist = occ, dist

    if plan.allow_empties:
        complete = np.arange(len(prev_occ), dtype=np.int64)
    else:
        complete = np.nonzero(prev_occ == plan.avail_mask)[0].astype(np.int64)
    if len(complete) == 0:
        raise InfeasibleError(
            "no path fills every position",
            suggested_theta=_suggest_theta(matrix, allow_outsiders, allow_empties, positions),
        )

    explored = sum(len(layer.parents) for layer in layers)
    stats = GraphStats(
        nodes=explored + 2,
        edges=explored + len(complete),
        explored_nodes=explored,
        rescued_layers=plan.rescued_layers,
        build_time=time.perf_counter() - t0,
    )
    assert stats.nodes == nodes and stats.edges == edges
    return ReassemblyGraph(plan=plan, layers=layers, complete=complete, stats=stats)


def _suggest_theta(matrix, allow_outsiders, allow_empties, positions) -> float | None:
    """Min edge probability along the uncut optimum; None if even theta=0 fails."""
    from .dp import solve_planned

    plan0 = plan_layers(matrix, allow_outsiders, allow_empties, CutPolicy(theta=0.0), positions)
    result = solve_planned(plan0)
    if result is None:
        return None
    _, codes = result
    return min(plan0.prob_of(k, int(c)) for k, c in enumerate(codes))


@dataclass
class PathEnumeration:
    paths: list[tuple[Assignment, float]]
    truncated: bool
    total: int


def enumerate_paths(graph: ReassemblyGraph, limit: int = 1_000_000) -> PathEnumeration:
    """Every complete path as (assignment, weight), lexicographic order."""
    total = graph.path_count
    leaves = graph.complete[: min(limit, total)]
    codes = graph.path_codes(leaves)
    weights = graph.layers[-1].dist[leaves]
    paths = [
        (graph.assignment_for_codes(codes[i]), float(weights[i]))
        for i in range(len(leaves))
    ]
    return PathEnumeration(paths=paths, truncated=total > limit, total=total)


def dump_edges(graph: ReassemblyGraph) -> list[dict]:
    """Edge list for debugging: decision edges layer by layer, then sink links."""
    out = []
    base = [2]
    for layer in graph.layers:
        base.append(base[-1] + len(layer.parents))
    for k, layer in enumerate(graph.layers):
        parent_base = 0 if k == 0 else base[k - 1]
        for i in range(len(layer.parents)):
            code = int(layer.codes[i])
            out.append({
                "from": 0 if k == 0 else parent_base + int(layer.parents[i]),
                "to": base[k] + i,
                "fragment": graph.plan.order[k],
                "position": code,
                "prob": graph.plan.prob_of(k, code),
                "weight": graph.plan.weight_of(k, code),
            })
    last = len(graph.layers) - 1
    for leaf in graph.complete:
        out.append({
            "from": base[last] + int(leaf),
            "to": 1,
            "fragment": None,
            "position": None,
            "prob": None,
            "weight": 0.0,
        })
    return out
