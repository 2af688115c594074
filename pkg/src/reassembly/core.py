"""Domain types and the shared JSON data model.

Position codes: 0 is the central slot, 1-8 are the lateral slots in raster
order (top-left, top, top-right, left, right, bottom-left, bottom,
bottom-right), 9 labels fragments that belong to another image entirely.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, FormatError

CENTER_CODE = 0
OUTSIDER_CODE = 9
LATERAL_CODES = tuple(range(1, 9))
N_CLASSES = 9  # 8 lateral slots + the outsider class

PROB_FLOOR = 1e-12
ROW_SUM_TOLERANCE = 1e-3

# Raster-order grid cells for each code; the centre occupies cell (1, 1).
CODE_TO_CELL = {
    1: (0, 0), 2: (0, 1), 3: (0, 2),
    4: (1, 0), 0: (1, 1), 5: (1, 2),
    6: (2, 0), 7: (2, 1), 8: (2, 2),
}
CELL_TO_CODE = {cell: code for code, cell in CODE_TO_CELL.items()}
# Offset of a lateral cell relative to the centre cell, keyed by code.
OFFSET_TO_CODE = {
    (dr, dc): CELL_TO_CODE[(1 + dr, 1 + dc)]
    for dr in (-1, 0, 1)
    for dc in (-1, 0, 1)
    if (dr, dc) != (0, 0)
}


def is_position_code(code: int) -> bool:
    return isinstance(code, int) and not isinstance(code, bool) and 0 <= code <= 9


def log_weight(p: float) -> float:
    """Edge weight for a placement probability: -ln(max(p, floor)).

    The floor keeps weights finite for zero-probability classes so that
    pruning, not infinities, decides feasibility.
    """
    if not isinstance(p, (int, float)) or isinstance(p, bool) or math.isnan(p):
        raise DomainError(f"probability must be a number in [0, 1], got {p!r}")
    if p < 0.0 or p > 1.0:
        raise DomainError(f"probability {p} outside [0, 1]")
    return -math.log(max(p, PROB_FLOOR))


@dataclass(frozen=True)
class PredictionMatrix:
    """Per-fragment probability rows conditioned on one central fragment.

    ``probs`` has one row per non-central fragment; columns map to position
    codes 1-8 then 9 (outsider), in that order. Rows are renormalized to
    sum to 1 on construction.
    """

    center: int
    fragments: tuple[int, ...]
    probs: np.ndarray  # shape (f, 9), float64

    @property
    def f(self) -> int:
        return len(self.fragments)

    def row(self, fragment: int) -> np.ndarray:
        return self.probs[self.fragments.index(fragment)]


def make_matrix(center: int, rows: list[tuple[int, list[float]]]) -> PredictionMatrix:
    """Validate and renormalize rows into a PredictionMatrix."""
    if not isinstance(center, int) or isinstance(center, bool) or center < 0:
        raise FormatError(f"center: expected a nonnegative integer, got {center!r}")
    if not rows:
        raise FormatError("rows: at least one row is required")
    fragments: list[int] = []
    data = np.empty((len(rows), N_CLASSES), dtype=np.float64)
    for i, (fragment, probs) in enumerate(rows):
        if not isinstance(fragment, int) or isinstance(fragment, bool) or fragment < 0:
            raise FormatError(f"rows[{i}].fragment: expected a nonnegative integer, got {fragment!r}")
        if fragment == center:
            raise FormatError(f"rows[{i}].fragment: {fragment} is the center and cannot have a row")
        if fragment in fragments:
            raise FormatError(f"rows[{i}].fragment: duplicate id {fragment}")
        if len(probs) != N_CLASSES:
            raise FormatError(f"rows[{i}].probs: expected {N_CLASSES} values, got {len(probs)}")
        for j, p in enumerate(probs):
            if not isinstance(p, (int, float)) or isinstance(p, bool) or not math.isfinite(p):
                raise FormatError(f"rows[{i}].probs[{j}]: expected a finite number, got {p!r}")
            if p < 0.0:
                raise FormatError(f"rows[{i}].probs[{j}]: negative probability {p}")
        total = float(sum(probs))
        if abs(total - 1.0) > ROW_SUM_TOLERANCE:
            raise FormatError(f"rows[{i}].probs: sum {total} outside [1-{ROW_SUM_TOLERANCE}, 1+{ROW_SUM_TOLERANCE}]")
        data[i] = np.asarray(probs, dtype=np.float64) / total
        fragments.append(fragment)
    data.flags.writeable = False
    return PredictionMatrix(center=center, fragments=tuple(fragments), probs=data)


def load_prediction_matrix(document: str) -> PredictionMatrix:
    """Parse and validate a prediction-matrix JSON document."""
    try:
        obj = json.loads(document)
    except json.JSONDecodeError as err:
        raise FormatError(f"not valid JSON: {err}") from err
    return matrix_from_obj(obj)


def matrix_from_obj(obj) -> PredictionMatrix:
    if not isinstance(obj, dict):
        raise FormatError("document: expected a JSON object")
    for key in ("center", "rows"):
        if key not in obj:
            raise FormatError(f"{key}: missing required field")
    if not isinstance(obj["rows"], list):
        raise FormatError("rows: expected a list")
    rows = []
    for i, row in enumerate(obj["rows"]):
        if not isinstance(row, dict) or "fragment" not in row or "probs" not in row:
            raise FormatError(f"rows[{i}]: expected an object with 'fragment' and 'probs'")
        if not isinstance(row["probs"], list):
            raise FormatError(f"rows[{i}].probs: expected a list")
        rows.append((row["fragment"], row["probs"]))
    return make_matrix(obj["center"], rows)


def matrix_to_obj(matrix: PredictionMatrix) -> dict:
    return {
        "center": matrix.center,
        "rows": [
            {"fragment": fragment, "probs": [float(p) for p in matrix.probs[i]]}
            for i, fragment in enumerate(matrix.fragments)
        ],
    }


def dump_prediction_matrix(matrix: PredictionMatrix) -> str:
    return json.dumps(matrix_to_obj(matrix), indent=2, sort_keys=True) + "\n"


@dataclass(frozen=True)
class Assignment:
    """A complete solution: which fragment sits where.

    ``center`` is the fragment at position 0 (None when no fragment holds
    the centre). ``placements`` maps every non-central fragment to a code in
    1-9; any number of fragments may share the outsider code 9 but lateral
    codes are exclusive. ``empties`` lists lateral slots deliberately left
    unfilled.
    """

    center: int | None
    placements: dict[int, int] = field(default_factory=dict)
    empties: frozenset[int] = frozenset()

    def __post_init__(self):
        occupied: set[int] = set()
        for fragment, code in self.placements.items():
            if not is_position_code(code) or code == CENTER_CODE:
                raise FormatError(f"placements[{fragment}]: position {code!r} not in 1..9")
            if fragment == self.center:
                raise FormatError(f"placements[{fragment}]: fragment is already the center")
            if code != OUTSIDER_CODE:
                if code in occupied:
                    raise FormatError(f"placements[{fragment}]: lateral position {code} already occupied")
                occupied.add(code)
        bad = set(self.empties) - set(LATERAL_CODES)
        if bad:
            raise FormatError(f"empties: codes {sorted(bad)} not in 1..8")
        clash = set(self.empties) & occupied
        if clash:
            raise FormatError(f"empties: positions {sorted(clash)} are occupied")

    @property
    def fragments(self) -> frozenset[int]:
        ids = set(self.placements)
        if self.center is not None:
            ids.add(self.center)
        return frozenset(ids)

    def occupant(self, code: int) -> int | None:
        """Fragment at a board slot (0-8), or None when the slot is empty."""
        if code == CENTER_CODE:
            return self.center
        for fragment, c in self.placements.items():
            if c == code:
                return fragment
        return None

    def outsiders(self) -> frozenset[int]:
        return frozenset(f for f, c in self.placements.items() if c == OUTSIDER_CODE)


def assignment_from_obj(obj) -> Assignment:
    if not isinstance(obj, dict):
        raise FormatError("document: expected a JSON object")
    for key in ("center", "placements"):
        if key not in obj:
            raise FormatError(f"{key}: missing required field")
    center = obj["center"]
    if center is not None and (not isinstance(center, int) or isinstance(center, bool) or center < 0):
        raise FormatError(f"center: expected a nonnegative integer or null, got {center!r}")
    if not isinstance(obj["placements"], list):
        raise FormatError("placements: expected a list")
    placements: dict[int, int] = {}
    for i, entry in enumerate(obj["placements"]):
        if not isinstance(entry, dict) or "fragment" not in entry or "position" not in entry:
            raise FormatError(f"placements[{i}]: expected an object with 'fragment' and 'position'")
        fragment, code = entry["fragment"], entry["position"]
        if not isinstance(fragment, int) or isinstance(fragment, bool) or fragment < 0:
            raise FormatError(f"placements[{i}].fragment: expected a nonnegative integer, got {fragment!r}")
        if not is_position_code(code):
            raise FormatError(f"placements[{i}].position: {code!r} not in 0..9")
        if fragment in placements or fragment == center:
            raise FormatError(f"placements[{i}].fragment: duplicate id {fragment}")
        if code == CENTER_CODE:
            # A position-0 row is an alternate spelling of the center field.
            if center is not None and center != fragment:
                raise FormatError(f"placements[{i}]: fragment {fragment} at position 0 but center is {center}")
            center = fragment
            continue
        placements[fragment] = code
    empties = obj.get("empties", [])
    if not isinstance(empties, list) or not all(isinstance(c, int) and not isinstance(c, bool) for c in empties):
        raise FormatError("empties: expected a list of integers")
    return Assignment(center=center, placements=placements, empties=frozenset(empties))


def load_assignment(document: str) -> Assignment:
    try:
        obj = json.loads(document)
    except json.JSONDecodeError as err:
        raise FormatError(f"not valid JSON: {err}") from err
    return assignment_from_obj(obj)


def assignment_to_obj(assignment: Assignment) -> dict:
    return {
        "center": assignment.center,
        "placements": [
            {"fragment": fragment, "position": code}
            for fragment, code in sorted(assignment.placements.items())
        ],
        "empties": sorted(assignment.empties),
    }


def dump_assignment(assignment: Assignment) -> str:
    return json.dumps(assignment_to_obj(assignment), indent=2, sort_keys=True) + "\n"


@dataclass(frozen=True)
class PuzzleInstance:
    """A fragment set plus whatever is known about its solution."""

    fragments: tuple[int, ...]
    known_center: int | None = None
    ground_truth: Assignment | None = None
    n_missing: int = 0
    n_outsiders: int = 0
    files: dict[int, str] | None = None

    def __post_init__(self):
        if len(set(self.fragments)) != len(self.fragments):
            raise FormatError("fragments: ids must be unique")
        if self.n_missing < 0 or self.n_outsiders < 0:
            raise FormatError("n_missing and n_outsiders must be >= 0")
        genuine = len(self.fragments) - (1 if self.known_center is not None else 0) - self.n_outsiders
        if self.n_missing + genuine != len(LATERAL_CODES):
            raise FormatError(
                f"{genuine} genuine lateral fragments with {self.n_missing} missing does not fill 8 slots"
            )


def instance_from_obj(obj) -> PuzzleInstance:
    if not isinstance(obj, dict):
        raise FormatError("document: expected a JSON object")
    for key in ("fragments", "known_center", "n_missing", "n_outsiders"):
        if key not in obj:
            raise FormatError(f"{key}: missing required field")
    files = None
    if obj.get("files") is not None:
        files = {int(k): str(v) for k, v in obj["files"].items()}
    return PuzzleInstance(
        fragments=tuple(obj["fragments"]),
        known_center=obj["known_center"],
        n_missing=obj["n_missing"],
        n_outsiders=obj["n_outsiders"],
        files=files,
    )


def load_instance(document: str) -> PuzzleInstance:
    try:
        obj = json.loads(document)
    except json.JSONDecodeError as err:
        raise FormatError(f"not valid JSON: {err}") from err
    return instance_from_obj(obj)


def instance_to_obj(instance: PuzzleInstance) -> dict:
    obj = {
        "fragments": list(instance.fragments),
        "known_center": instance.known_center,
        "n_missing": instance.n_missing,
        "n_outsiders": instance.n_outsiders,
    }
    if instance.files is not None:
        obj["files"] = {str(k): v for k, v in sorted(instance.files.items())}
    return obj


@dataclass
class GraphStats:
    """Size and effort counters for one build+solve."""

    nodes: int = 0
    edges: int = 0
    explored_nodes: int = 0
    rescued_layers: int = 0
    build_time: float = 0.0
    solve_time: float = 0.0

    def to_obj(self, include_times: bool = False) -> dict:
        obj = {
            "nodes": self.nodes,
            "edges": self.edges,
            "explored_nodes": self.explored_nodes,
            "rescued_layers": self.rescued_layers,
        }
        if include_times:
            obj["build_time"] = self.build_time
            obj["solve_time"] = self.solve_time
        return obj


def dump_json(obj) -> str:
    """Canonical JSON used for all file outputs (stable key order)."""
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
