"""Turn source images into puzzle instances with ground truth.

A 432x432 region is cropped at random, split into a 3x3 grid of 144px
cells, and a 96x96 fragment is cropped at a uniform random offset inside
each cell. The offsets leave a gap between neighbouring fragments that is
48px on average (half a fragment side) and never negative, which destroys
border continuity the way erosion does.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .core import (
    CELL_TO_CODE,
    LATERAL_CODES,
    OUTSIDER_CODE,
    Assignment,
    PuzzleInstance,
    assignment_to_obj,
    dump_json,
    instance_to_obj,
)
from .errors import ConfigError, DomainError

FRAGMENT_SIZE = 96
MARGIN = 48
GRID = 3
CELL = FRAGMENT_SIZE + MARGIN
REGION = GRID * CELL  # 432


@dataclass(frozen=True)
class FragmentationSpec:
    seed: int = 0
    n_missing: int = 0
    n_outsiders: int = 0
    outsider_source: tuple[str, ...] = ()
    multi_per_source: bool = False

    def __post_init__(self):
        if not 0 <= self.n_missing <= 7:
            raise ConfigError(f"n_missing must be in 0..7, got {self.n_missing}")
        if self.n_outsiders < 0:
            raise ConfigError(f"n_outsiders must be >= 0, got {self.n_outsiders}")
        if self.n_outsiders > 0 and not self.outsider_source:
            raise ConfigError("outsider fragments requested but no outsider_source given")
        if self.n_outsiders > len(self.outsider_source) and not self.multi_per_source:
            raise ConfigError(
                f"{self.n_outsiders} outsiders need {self.n_outsiders} source images "
                f"(got {len(self.outsider_source)}); pass multi_per_source to reuse them"
            )


@dataclass
class FragmentationResult:
    instance: PuzzleInstance
    truth: Assignment
    pixels: dict[int, np.ndarray]
    source_rects: dict[int, tuple[int, int]] = field(default_factory=dict)  # (top, left) in the source


def load_image(path: str | Path) -> np.ndarray:
    """Load an image as (H, W, 3) uint8, promoting grayscale to 3 channels."""
    with Image.open(path) as img:
        return np.asarray(img.convert("RGB"), dtype=np.uint8)


def _crop_cells(image: np.ndarray, rng: np.random.Generator):
    """Random region origin plus one fragment crop per grid cell."""
    h, w = image.shape[:2]
    if h < REGION or w < REGION:
        raise DomainError(f"image is {w}x{h}; fragmentation needs at least {REGION}x{REGION}")
    oy = int(rng.integers(0, h - REGION + 1))
    ox = int(rng.integers(0, w - REGION + 1))
    slack = CELL - FRAGMENT_SIZE
    crops = {}
    for r in range(GRID):
        for c in range(GRID):
            top = oy + r * CELL + int(rng.integers(0, slack + 1))
            left = ox + c * CELL + int(rng.integers(0, slack + 1))
            crops[(r, c)] = (top, left)
    return crops


def fragment_image(image: np.ndarray, spec: FragmentationSpec) -> FragmentationResult:
    """Cut one puzzle out of an image, with missing and outsider injection."""
    rng = np.random.default_rng(spec.seed)
    crops = _crop_cells(image, rng)

    missing = sorted(int(c) for c in rng.choice(LATERAL_CODES, size=spec.n_missing, replace=False))
    keep = [
        (CELL_TO_CODE[cell], image, top_left)
        for cell, top_left in sorted(crops.items())
        if CELL_TO_CODE[cell] != 0 and CELL_TO_CODE[cell] not in missing
    ]

    outsider_crops = []
    for j in range(spec.n_outsiders):
        src = spec.outsider_source[j if not spec.multi_per_source else j % len(spec.outsider_source)]
        other = load_image(src)
        other_crops = _crop_cells(other, rng)
        cell = sorted(other_crops)[int(rng.integers(0, len(other_crops)))]
        outsider_crops.append((OUTSIDER_CODE, other, other_crops[cell]))

    # Shuffle ids so a fragment's id says nothing about its true position.
    laterals = keep + outsider_crops
    order = rng.permutation(len(laterals))
    center_cell = crops[(1, 1)]

    pixels = {0: _cut(image, center_cell)}
    rects = {0: center_cell}
    placements = {}
    for new_id, idx in enumerate(order, start=1):
        code, src_img, top_left = laterals[idx]
        placements[new_id] = code
        pixels[new_id] = _cut(src_img, top_left)
        rects[new_id] = top_left

    truth = Assignment(center=0, placements=placements, empties=frozenset(missing))
    instance = PuzzleInstance(
        fragments=tuple(sorted(pixels)),
        known_center=0,
        ground_truth=truth,
        n_missing=spec.n_missing,
        n_outsiders=spec.n_outsiders,
        files={i: f"frag_{i}.png" for i in sorted(pixels)},
    )
    return FragmentationResult(instance=instance, truth=truth, pixels=pixels, source_rects=rects)


def _cut(image: np.ndarray, top_left: tuple[int, int]) -> np.ndarray:
    top, left = top_left
    return np.ascontiguousarray(image[top:top + FRAGMENT_SIZE, left:left + FRAGMENT_SIZE])


def write_outputs(result: FragmentationResult, out_dir: str | Path) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for frag_id, array in sorted(result.pixels.items()):
        Image.fromarray(array).save(out / f"frag_{frag_id}.png")
    (out / "truth.json").write_text(dump_json(assignment_to_obj(result.truth)), encoding="utf-8")
    (out / "instance.json").write_text(dump_json(instance_to_obj(result.instance)), encoding="utf-8")


def load_fragment_pixels(directory: str | Path, instance: PuzzleInstance) -> dict[int, np.ndarray]:
    directory = Path(directory)
    files = instance.files or {i: f"frag_{i}.png" for i in instance.fragments}
    return {i: load_image(directory / name) for i, name in files.items()}
