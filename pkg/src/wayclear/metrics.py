"""Attention-change and image-quality metrics, plus object insertion.

The attention deltas compare a pre-edit and a post-edit attention map
over an explicit pixel region: relative attention gain on objects of
interest and relative attention reduction on the edited (distracting)
region. Quality metrics (mean absolute error, PSNR, SSIM) compare an
edited image against ground truth; `insert_objects` builds such ground
truth by pasting cutouts into a clean image and returning the combined
footprint as the inpainting mask.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import DimensionMismatchError, UndefinedMetricError
from .rasters import InpaintMask, RgbImage, ScalarMap, require_same_shape

__all__ = [
    "AttentionDelta",
    "QualityReport",
    "compute_vo",
    "compute_vd",
    "attention_delta",
    "compute_quality",
    "insert_objects",
]

PSNR_CAP_DB = 100.0
_PSNR_MSE_FLOOR = 1e-10
SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03
_LUMA = (0.299, 0.587, 0.114)  # Rec. 601


@dataclass(frozen=True)
class AttentionDelta:
    """Relative attention shift: gain on interest, drop on distraction."""

    v_o: float
    v_d: float


@dataclass(frozen=True)
class QualityReport:
    l1: float
    psnr_db: float
    ssim: float


def _region_sums(
    before: ScalarMap, after: ScalarMap, region: np.ndarray, what: str
) -> tuple[float, float]:
    require_same_shape(before, after)
    if region.shape != before.values.shape or region.dtype != np.bool_:
        raise DimensionMismatchError(
            f"region mask {region.shape}/{region.dtype} does not match maps "
            f"{before.values.shape}"
        )
    if not region.any():
        raise UndefinedMetricError(f"{what}: region is empty")
    base = float(before.values[region].astype(np.float64).sum())
    if base <= 0.0:
        raise UndefinedMetricError(f"{what}: pre-edit attention mass over the region is zero")
    post = float(after.values[region].astype(np.float64).sum())
    return base, post


def compute_vo(v_before: ScalarMap, v_after: ScalarMap, region_o: np.ndarray) -> float:
    """Relative attention increase over the interest region.

    (sum_after - sum_before) / sum_before over region_o; errors on an
    empty region or zero pre-edit mass rather than reporting 0 or inf.
    """
    base, post = _region_sums(v_before, v_after, region_o, "v_o")
    return (post - base) / base


def compute_vd(v_before: ScalarMap, v_after: ScalarMap, region_d: np.ndarray) -> float:
    """Relative attention reduction over the distracting region."""
    base, post = _region_sums(v_before, v_after, region_d, "v_d")
    return (base - post) / base


def attention_delta(
    v_before: ScalarMap,
    v_after: ScalarMap,
    region_interest: np.ndarray,
    region_distract: np.ndarray,
) -> AttentionDelta:
    return AttentionDelta(
        v_o=compute_vo(v_before, v_after, region_interest),
        v_d=compute_vd(v_before, v_after, region_distract),
    )


def _gaussian_window(size: int, sigma: float) -> np.ndarray:
    half = (size - 1) / 2.0
    coords = np.arange(size) - half
    g = np.exp(-(coords**2) / (2.0 * sigma**2))
    win = np.outer(g, g)
    return win / win.sum()


def _luminance(img: RgbImage) -> np.ndarray:
    p = img.pixels.astype(np.float64)
    return _LUMA[0] * p[0] + _LUMA[1] * p[1] + _LUMA[2] * p[2]


def _ssim(x: np.ndarray, y: np.ndarray) -> float:
    size = min(SSIM_WINDOW, x.shape[0], x.shape[1])
    if size % 2 == 0:
        size -= 1
    win = _gaussian_window(size, SSIM_SIGMA)
    pad = (size - 1) // 2

    def filt(arr: np.ndarray) -> np.ndarray:
        full = ndimage.correlate(arr, win, mode="constant")
        if pad == 0:
            return full
        return full[pad:-pad, pad:-pad]  # windows fully inside the image

    mu_x = filt(x)
    mu_y = filt(y)
    var_x = filt(x * x) - mu_x**2
    var_y = filt(y * y) - mu_y**2
    cov = filt(x * y) - mu_x * mu_y
    c1 = (SSIM_K1 * 1.0) ** 2
    c2 = (SSIM_K2 * 1.0) ** 2
    num = (2.0 * mu_x * mu_y + c1) * (2.0 * cov + c2)
    den = (mu_x**2 + mu_y**2 + c1) * (var_x + var_y + c2)
    return float((num / den).mean())


def compute_quality(reference: RgbImage, candidate: RgbImage) -> QualityReport:
    """Mean absolute error, PSNR (capped at 100 dB) and Gaussian-window SSIM.

    PSNR assumes a [0, 1] dynamic range. SSIM runs on Rec. 601 luminance
    with an 11x11 Gaussian window (sigma 1.5), shrunk to the largest odd
    size that fits when the image is smaller than the window.
    """
    require_same_shape(reference, candidate)
    diff = candidate.pixels.astype(np.float64) - reference.pixels.astype(np.float64)
    l1 = float(np.abs(diff).mean())
    mse = float((diff**2).mean())
    psnr = PSNR_CAP_DB if mse < _PSNR_MSE_FLOOR else 10.0 * math.log10(1.0 / mse)
    ssim = _ssim(_luminance(reference), _luminance(candidate))
    return QualityReport(l1=l1, psnr_db=psnr, ssim=ssim)


Cutout = tuple[RgbImage, InpaintMask, tuple[int, int]]


def insert_objects(base: RgbImage, cutouts: list[Cutout]) -> tuple[RgbImage, InpaintMask]:
    """Paste masked cutouts into `base`; returns the image and the footprint.

    Each cutout is (image, mask, (row, col)) with (row, col) the top-left
    placement. The returned mask is the union of pasted footprints: exactly
    the region an inpainting model must reconstruct to undo the insertion.
    Raises ValueError when a cutout does not fit inside `base`.
    """
    out = base.pixels.copy()
    footprint = np.zeros((base.height, base.width), dtype=bool)
    for idx, (cut, cmask, (row, col)) in enumerate(cutouts):
        require_same_shape(cut, cmask)
        if row < 0 or col < 0 or row + cut.height > base.height or col + cut.width > base.width:
            raise ValueError(
                f"cutout {idx} at ({row}, {col}) size {cut.height}x{cut.width} "
                f"falls outside the {base.height}x{base.width} base image"
            )
        window = out[:, row : row + cut.height, col : col + cut.width]
        window[:, cmask.bits] = cut.pixels[:, cmask.bits]
        footprint[row : row + cut.height, col : col + cut.width] |= cmask.bits
    return RgbImage(pixels=out), InpaintMask(bits=footprint)
