"""Evaluation metrics: perfect, well-placed fraction, almost-perfect.

The almost-perfect metric forgives a wrong lateral slot only when the
fragment put there looks like the true occupant: their mean absolute
per-pixel difference (0-255 scale) must fall under a threshold, 20 by
default. Slots involving empties, the centre, or fragments that really
belong to another image are never forgiven.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import CENTER_CODE, LATERAL_CODES, OUTSIDER_CODE, Assignment
from .errors import ConfigError, MetricError

DEFAULT_TAU = 20.0
BOARD_SLOTS = (CENTER_CODE,) + LATERAL_CODES


def pixel_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Mean absolute per-pixel, per-channel difference on the 0-255 scale."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise MetricError(f"fragment shapes differ: {a.shape} vs {b.shape}")
    return float(np.mean(np.abs(a.astype(np.float64) - b.astype(np.float64))))


@dataclass
class MetricReport:
    perfect: bool
    well_placed_fraction: float
    almost_perfect: bool
    per_position: list[dict]

    def to_obj(self) -> dict:
        return {
            "perfect": self.perfect,
            "well_placed_fraction": self.well_placed_fraction,
            "almost_perfect": self.almost_perfect,
            "per_position": self.per_position,
        }


def evaluate(
    predicted: Assignment,
    truth: Assignment,
    pixels: dict[int, np.ndarray] | None = None,
    tau: float = DEFAULT_TAU,
) -> MetricReport:
    """Score a predicted assignment against the ground truth.

    ``pixels`` maps fragment ids to arrays and is only needed to tell
    excusable swaps apart; without it, almost-perfect degrades to perfect.
    """
    if predicted.fragments != truth.fragments:
        raise MetricError(
            f"assignments cover different fragments: {sorted(predicted.fragments)} vs {sorted(truth.fragments)}"
        )

    matches = 0
    mismatched: list[tuple[int, int | None, int | None]] = []
    detail: list[dict] = []
    for slot in BOARD_SLOTS:
        pf = predicted.occupant(slot)
        tf = truth.occupant(slot)
        ok = pf == tf
        matches += ok
        if not ok:
            mismatched.append((slot, pf, tf))
        detail.append({
            "position": slot,
            "predicted": pf,
            "true": tf,
            "match": bool(ok),
            "pixel_distance": None,
        })

    # All nine slots agreeing pins everything else down: fragments off the
    # board must carry the outsider label and unfilled slots are the empties.
    perfect = matches == len(BOARD_SLOTS)

    almost = perfect
    if not perfect:
        almost = True
        for slot, pf, tf in mismatched:
            if slot == CENTER_CODE or pf is None or tf is None:
                almost = False
                continue
            if truth.placements.get(pf) == OUTSIDER_CODE:
                almost = False  # an outsider slipped onto the board
                continue
            if pixels is None:
                almost = False
                continue
            if pf not in pixels or tf not in pixels:
                raise ConfigError(f"pixel data required for fragments {pf} and {tf}")
            d = pixel_distance(pixels[pf], pixels[tf])
            detail[BOARD_SLOTS.index(slot)]["pixel_distance"] = d
            if not d < tau:
                almost = False

    return MetricReport(
        perfect=bool(perfect),
        well_placed_fraction=matches / len(BOARD_SLOTS),
        almost_perfect=bool(almost),
        per_position=detail,
    )
