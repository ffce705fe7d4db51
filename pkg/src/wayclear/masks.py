"""Semantic-level inpainting mask composition.

A saliency raster is binarized relative to its own maximum, the label map
is partitioned into four class groups (building / human / vehicle / sign),
and any group outside the building level that the binarized saliency
touches is masked in full: one salient pixel on any vehicle masks every
vehicle pixel in the image. Building pixels are never masked.

Class groups default to Cityscapes labelIds and are configurable through a
JSON spec file: {"levels": {"building": [...], "human": [...],
"vehicle": [...], "sign": [...]}, "road": [...]}.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
from scipy import ndimage

from .errors import DimensionMismatchError
from .rasters import InpaintMask, LabelMap, ScalarMap

__all__ = [
    "SemanticLevelSpec",
    "LevelPartition",
    "load_level_spec",
    "default_level_spec",
    "binarize_saliency",
    "classify_levels",
    "compose_inpaint_mask",
    "dilate_mask",
]

LEVEL_NAMES = ("building", "human", "vehicle", "sign")

# Saliency values within this relative distance of the threshold count as
# "not above" it; absorbs float32 quantization noise of 8-bit sources
# (lattice spacing 1/255 is ~4000x larger than the guard).
_THRESHOLD_GUARD = 1e-6


@dataclass(frozen=True)
class SemanticLevelSpec:
    """Disjoint class-ID sets for the four semantic levels.

    Level 0 (building) marks objects of interest; levels 1-3 (human,
    vehicle, sign) mark distracting objects. `road_ids` rides along for
    street-geometry estimation and plays no role in mask composition.
    """

    building_ids: frozenset[int]
    human_ids: frozenset[int]
    vehicle_ids: frozenset[int]
    sign_ids: frozenset[int]
    road_ids: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        levels = self.levels()
        for ids in levels:
            for cid in ids:
                if not 0 <= cid <= 255:
                    raise ValueError(f"class ID {cid} outside [0, 255]")
        seen: set[int] = set()
        for name, ids in zip(LEVEL_NAMES, levels):
            overlap = seen & ids
            if overlap:
                raise ValueError(f"level {name!r} overlaps another level on IDs {sorted(overlap)}")
            seen |= ids

    def levels(self) -> tuple[frozenset[int], ...]:
        return (self.building_ids, self.human_ids, self.vehicle_ids, self.sign_ids)


@dataclass(frozen=True)
class LevelPartition:
    """Pixel bitmasks per semantic level, aligned to one label map.

    regions[0] holds building pixels (objects of interest); the union of
    regions[1..3] is the distracting-object region.
    """

    regions: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]  # (H, W) bool each

    def __post_init__(self) -> None:
        shapes = {r.shape for r in self.regions}
        if len(shapes) != 1:
            raise ValueError("partition regions must share one shape")
        for a, b in ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)):
            if np.any(self.regions[a] & self.regions[b]):
                raise ValueError("partition regions must be pairwise disjoint")

    @property
    def building(self) -> np.ndarray:
        return self.regions[0]

    def distracting(self) -> np.ndarray:
        """Union of the human, vehicle and sign regions."""
        return self.regions[1] | self.regions[2] | self.regions[3]


def _parse_spec(doc: dict) -> SemanticLevelSpec:
    levels = doc.get("levels")
    if not isinstance(levels, dict):
        raise ValueError("level spec JSON needs a 'levels' object")
    missing = [name for name in LEVEL_NAMES if name not in levels]
    if missing:
        raise ValueError(f"level spec missing levels: {missing}")
    return SemanticLevelSpec(
        building_ids=frozenset(int(i) for i in levels["building"]),
        human_ids=frozenset(int(i) for i in levels["human"]),
        vehicle_ids=frozenset(int(i) for i in levels["vehicle"]),
        sign_ids=frozenset(int(i) for i in levels["sign"]),
        road_ids=frozenset(int(i) for i in doc.get("road", [])),
    )


def load_level_spec(path: str | Path) -> SemanticLevelSpec:
    """Load a SemanticLevelSpec from its JSON file format."""
    with open(path, encoding="utf-8") as fh:
        return _parse_spec(json.load(fh))


def default_level_spec() -> SemanticLevelSpec:
    """The Cityscapes labelIds spec shipped with the package."""
    text = resources.files("wayclear.data").joinpath("cityscapes_levels.json").read_text("utf-8")
    return _parse_spec(json.loads(text))


def binarize_saliency(saliency: ScalarMap, gamma: float = 0.8) -> InpaintMask:
    """Threshold a saliency map at gamma times its own maximum (strict >).

    An all-zero map yields an all-false mask. The relative threshold makes
    the result invariant under uniform positive scaling of the map.
    """
    if not 0.0 < gamma <= 1.0:
        raise ValueError(f"gamma must lie in (0, 1], got {gamma}")
    values = saliency.values.astype(np.float64)
    peak = float(values.max())
    if peak <= 0.0:
        return InpaintMask(bits=np.zeros(values.shape, dtype=bool))
    threshold = peak * (gamma + _THRESHOLD_GUARD)
    return InpaintMask(bits=values > threshold)


def classify_levels(labels: LabelMap, spec: SemanticLevelSpec) -> LevelPartition:
    """Partition label-map pixels into the four semantic level regions.

    Class IDs not listed in the spec are neutral and fall in no region.
    """
    regions = tuple(
        np.isin(labels.classes, np.fromiter(ids, dtype=np.uint8, count=len(ids)))
        if ids
        else np.zeros(labels.classes.shape, dtype=bool)
        for ids in spec.levels()
    )
    return LevelPartition(regions=regions)


def compose_inpaint_mask(salient: InpaintMask, partition: LevelPartition) -> InpaintMask:
    """Extend an instance-level salient mask to the semantic level.

    Each distracting level (human, vehicle, sign) whose region shares at
    least one pixel with the salient mask contributes its whole region;
    the building region never does. Salient pixels on neutral or building
    classes are dropped.
    """
    if salient.bits.shape != partition.building.shape:
        raise DimensionMismatchError(
            f"salient mask {salient.bits.shape} does not match partition {partition.building.shape}"
        )
    out = np.zeros(salient.bits.shape, dtype=bool)
    for region in partition.regions[1:]:
        if np.any(salient.bits & region):
            out |= region
    return InpaintMask(bits=out)


def dilate_mask(mask: InpaintMask, radius: int = 0) -> InpaintMask:
    """Morphological dilation with a square element of side 2*radius + 1."""
    if radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    if radius == 0:
        return InpaintMask(bits=mask.bits.copy())
    structure = np.ones((2 * radius + 1, 2 * radius + 1), dtype=bool)
    return InpaintMask(bits=ndimage.binary_dilation(mask.bits, structure=structure))
