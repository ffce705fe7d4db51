"""Street aspect ratio estimation and urban-morphology bucketing.

The aspect ratio divides an estimated building (canyon wall) height by an
estimated street width, both in pixels from the label map. The bucket
boundaries are the contract here; the estimator is a replaceable
geometric heuristic (it reports a single scalar and does not attempt
multi-canyon scenes).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .masks import SemanticLevelSpec
from .rasters import LabelMap

__all__ = ["CanyonClass", "BUCKET_INTERVALS", "estimate_aspect_ratio", "classify_canyon"]

BUCKET_INTERVALS = {
    "non_canyon": "α=0",
    "low": "0<α≤1",
    "mid": "1<α≤2",
    "high": "α>2",
}


@dataclass(frozen=True)
class CanyonClass:
    bucket: str  # non_canyon | low | mid | high
    alpha: float

    def __post_init__(self) -> None:
        if self.bucket not in BUCKET_INTERVALS:
            raise ValueError(f"unknown bucket {self.bucket!r}")

    @property
    def interval(self) -> str:
        return BUCKET_INTERVALS[self.bucket]


def _isin(classes: np.ndarray, ids: Iterable[int]) -> np.ndarray:
    ids = list(ids)
    if not ids:
        return np.zeros(classes.shape, dtype=bool)
    return np.isin(classes, np.array(ids, dtype=np.uint8))


def _longest_run(row: np.ndarray) -> int:
    if not row.any():
        return 0
    padded = np.concatenate([[0], row.astype(np.int8), [0]])
    edges = np.diff(padded)
    starts = np.nonzero(edges == 1)[0]
    ends = np.nonzero(edges == -1)[0]
    return int((ends - starts).max())


def estimate_aspect_ratio(
    labels: LabelMap,
    spec: SemanticLevelSpec,
    road_ids: Iterable[int] | None = None,
) -> float:
    """Canyon height over canyon width, from the label map alone.

    Height: median building-pixel count over columns containing any
    building pixel. Width: longest contiguous road run in the row at the
    road region's vertical centroid. Returns 0.0 for degenerate scenes
    (no buildings, no road, or no road run in the centroid row).
    """
    ids = spec.road_ids if road_ids is None else frozenset(int(i) for i in road_ids)
    building = _isin(labels.classes, spec.building_ids)
    column_counts = building.sum(axis=0)
    occupied = column_counts[column_counts > 0]
    if occupied.size == 0:
        return 0.0
    height = float(np.median(occupied))

    road = _isin(labels.classes, ids)
    road_rows = np.nonzero(road)[0]
    if road_rows.size == 0:
        return 0.0
    centroid_row = int(np.floor(road_rows.mean() + 0.5))
    centroid_row = min(max(centroid_row, 0), labels.height - 1)
    width = _longest_run(road[centroid_row])
    if width == 0:
        return 0.0
    return height / width


def classify_canyon(alpha: float) -> CanyonClass:
    """Bucket an aspect ratio: 0 / (0,1] / (1,2] / (2,inf)."""
    if alpha < 0:
        raise ValueError(f"aspect ratio must be >= 0, got {alpha}")
    if alpha == 0:
        bucket = "non_canyon"
    elif alpha <= 1:
        bucket = "low"
    elif alpha <= 2:
        bucket = "mid"
    else:
        bucket = "high"
    return CanyonClass(bucket=bucket, alpha=alpha)
