"""Calibrated synthetic prediction matrices, no network required.

Rows are built so that the argmax lands on the true class with probability
exactly ``accuracy``: a dominant mass drawn from U(0.55, 0.95) goes to the
chosen argmax and the rest is Dirichlet noise over the other classes, so
the dominant entry always wins. The "neighbor" confusion mode concentrates
both the wrong-argmax choice and the residual noise on positions spatially
adjacent to the true one, mimicking how visually similar neighbouring
fragments get confused.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    CODE_TO_CELL,
    LATERAL_CODES,
    OFFSET_TO_CODE,
    OUTSIDER_CODE,
    Assignment,
    PredictionMatrix,
    make_matrix,
)
from .errors import ConfigError, DomainError

CONFUSIONS = ("dirichlet", "neighbor")
_DOMINANT_LOW, _DOMINANT_HIGH = 0.55, 0.95
_NEIGHBOR_WEIGHT = 4.0

# Class order within a row: codes 1..8 then 9.
_ROW_CODES = list(LATERAL_CODES) + [OUTSIDER_CODE]


def _adjacent(code_a: int, code_b: int) -> bool:
    if code_a == OUTSIDER_CODE or code_b == OUTSIDER_CODE:
        return False
    (r1, c1), (r2, c2) = CODE_TO_CELL[code_a], CODE_TO_CELL[code_b]
    return max(abs(r1 - r2), abs(c1 - c2)) <= 1


def _confusion_weights(confusion: str) -> np.ndarray:
    """(9, 9) weight of emitting class j when the true class is i (i==j zeroed)."""
    w = np.ones((9, 9))
    if confusion == "neighbor":
        for i, ci in enumerate(_ROW_CODES):
            for j, cj in enumerate(_ROW_CODES):
                if i != j and _adjacent(ci, cj):
                    w[i, j] = _NEIGHBOR_WEIGHT
    np.fill_diagonal(w, 0.0)
    return w


@dataclass(frozen=True)
class ScorerModel:
    accuracy: float
    confusion: str = "dirichlet"
    seed: int = 0

    def __post_init__(self):
        if not 1.0 / 9.0 < self.accuracy <= 1.0:
            raise DomainError(f"accuracy must be in (1/9, 1], got {self.accuracy}")
        if self.confusion not in CONFUSIONS:
            raise DomainError(f"confusion must be one of {CONFUSIONS}, got {self.confusion!r}")


def synthesize_rows(
    true_classes: np.ndarray,
    model: ScorerModel,
    rng: np.random.Generator,
) -> np.ndarray:
    """Batched row synthesis: (..., ) true codes -> (..., 9) probabilities."""
    true_classes = np.asarray(true_classes)
    true_col = np.where(true_classes == OUTSIDER_CODE, 8, true_classes - 1)
    shape = true_col.shape

    if model.accuracy == 1.0:
        rows = np.zeros(shape + (9,))
        np.put_along_axis(rows, true_col[..., None], 1.0, axis=-1)
        return rows

    wrong_w = _confusion_weights(model.confusion)[true_col]  # (..., 9)
    wrong_cdf = np.cumsum(wrong_w / wrong_w.sum(axis=-1, keepdims=True), axis=-1)
    wrong_col = np.minimum(np.sum(rng.random(shape)[..., None] > wrong_cdf, axis=-1), 8)

    correct = rng.random(shape) < model.accuracy
    argmax_col = np.where(correct, true_col, wrong_col)

    dominant = rng.uniform(_DOMINANT_LOW, _DOMINANT_HIGH, shape)
    if model.confusion == "neighbor":
        alphas = np.where(_confusion_weights("neighbor")[true_col] > 1.0, _NEIGHBOR_WEIGHT, 1.0)
    else:
        alphas = np.ones(shape + (9,))
    noise = rng.standard_gamma(alphas)
    np.put_along_axis(noise, argmax_col[..., None], 0.0, axis=-1)
    noise /= noise.sum(axis=-1, keepdims=True)

    rows = noise * (1.0 - dominant)[..., None]
    np.put_along_axis(rows, argmax_col[..., None], dominant[..., None], axis=-1)
    return rows / rows.sum(axis=-1, keepdims=True)


def true_classes(truth: Assignment) -> tuple[list[int], np.ndarray]:
    """Non-center fragment ids (ascending) and their true class codes."""
    fragments = sorted(truth.placements)
    return fragments, np.array([truth.placements[f] for f in fragments], dtype=np.int64)


def synthesize(truth: Assignment, model: ScorerModel, rng: np.random.Generator | None = None) -> PredictionMatrix:
    """Emit one prediction matrix for a known-center instance."""
    if truth.center is None:
        raise ConfigError("synthesize needs a known center")
    if rng is None:
        rng = np.random.default_rng(model.seed)
    fragments, classes = true_classes(truth)
    if not fragments:
        raise ConfigError("truth has no lateral fragments to score")
    rows = synthesize_rows(classes, model, rng)
    return make_matrix(truth.center, [(f, [float(p) for p in rows[i]]) for i, f in enumerate(fragments)])


def synthesize_unknown_center(
    truth: Assignment,
    model: ScorerModel,
    rng: np.random.Generator | None = None,
) -> list[PredictionMatrix]:
    """One matrix per center hypothesis, ordered by hypothesis id.

    Under a wrong hypothesis, fragments whose true cell falls outside the
    3x3 window around the hypothesised centre carry no positional signal;
    their rows are plain Dirichlet noise. True outsiders keep class 9 under
    every hypothesis.
    """
    if rng is None:
        rng = np.random.default_rng(model.seed)
    all_ids = sorted(truth.fragments)
    cells = {}
    for frag in all_ids:
        code = truth.placements.get(frag, 0 if frag == truth.center else None)
        cells[frag] = CODE_TO_CELL.get(code) if code != OUTSIDER_CODE else None

    matrices = []
    for hypo in all_ids:
        others = [f for f in all_ids if f != hypo]
        klass = np.zeros(len(others), dtype=np.int64)
        informative = np.zeros(len(others), dtype=bool)
        for i, g in enumerate(others):
            if truth.placements.get(g) == OUTSIDER_CODE:
                klass[i], informative[i] = OUTSIDER_CODE, True
            elif cells[hypo] is not None and cells[g] is not None:
                dr = cells[g][0] - cells[hypo][0]
                dc = cells[g][1] - cells[hypo][1]
                if (dr, dc) in OFFSET_TO_CODE:
                    klass[i], informative[i] = OFFSET_TO_CODE[(dr, dc)], True
        rows = synthesize_rows(np.maximum(klass, 1), model, rng)
        blind = rng.standard_gamma(np.ones((len(others), 9)))
        blind /= blind.sum(axis=-1, keepdims=True)
        rows = np.where(informative[:, None], rows, blind)
        matrices.append(make_matrix(hypo, [(g, [float(p) for p in rows[i]]) for i, g in enumerate(others)]))
    return matrices


def random_truth(
    rng: np.random.Generator,
    n_missing: int = 0,
    n_outsiders: int = 0,
    center: int = 0,
) -> Assignment:
    """A uniformly random ground truth for a synthetic instance."""
    if not 0 <= n_missing <= 7:
        raise ConfigError(f"n_missing must be in 0..7, got {n_missing}")
    missing = sorted(int(c) for c in rng.choice(LATERAL_CODES, size=n_missing, replace=False))
    open_positions = [c for c in LATERAL_CODES if c not in missing]
    n_genuine = len(open_positions)
    ids = list(rng.permutation(np.arange(1, n_genuine + n_outsiders + 1)))
    placements = {int(f): int(c) for f, c in zip(ids[:n_genuine], rng.permutation(open_positions))}
    placements.update({int(f): OUTSIDER_CODE for f in ids[n_genuine:]})
    return Assignment(center=center, placements=placements, empties=frozenset(missing))
