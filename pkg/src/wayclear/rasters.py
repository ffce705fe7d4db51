"""Raster data model and 8-bit PNG decode/encode.

All rasters travel as 8-bit non-interlaced PNG: RGB for photographs,
grayscale for label maps, saliency/attention maps and binary masks.
Masks are stored on disk as {0, 255} and thresholded at 128 on read;
scalar maps decode as raw/255. Encoding quantizes with round-half-up so
roundtrips are bit-exact for labels/masks and within half a quantization
step (1/510) per channel for scalar/RGB data.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import RasterDecodeError

__all__ = [
    "RgbImage",
    "LabelMap",
    "ScalarMap",
    "InpaintMask",
    "decode_raster",
    "encode_raster",
]


@dataclass(frozen=True)
class RgbImage:
    """3-channel image, channel-major float32 in [0, 1]."""

    pixels: np.ndarray  # (3, H, W)

    def __post_init__(self) -> None:
        if self.pixels.ndim != 3 or self.pixels.shape[0] != 3:
            raise ValueError("RgbImage.pixels must have shape (3, H, W)")
        if self.pixels.shape[1] < 1 or self.pixels.shape[2] < 1:
            raise ValueError("RgbImage dimensions must be positive")
        if self.pixels.dtype != np.float32:
            raise ValueError("RgbImage.pixels must be float32")

    @property
    def height(self) -> int:
        return self.pixels.shape[1]

    @property
    def width(self) -> int:
        return self.pixels.shape[2]


@dataclass(frozen=True)
class LabelMap:
    """Per-pixel semantic class IDs in [0, 255]."""

    classes: np.ndarray  # (H, W) uint8

    def __post_init__(self) -> None:
        if self.classes.ndim != 2:
            raise ValueError("LabelMap.classes must have shape (H, W)")
        if self.classes.shape[0] < 1 or self.classes.shape[1] < 1:
            raise ValueError("LabelMap dimensions must be positive")
        if self.classes.dtype != np.uint8:
            raise ValueError("LabelMap.classes must be uint8")

    @property
    def height(self) -> int:
        return self.classes.shape[0]

    @property
    def width(self) -> int:
        return self.classes.shape[1]


@dataclass(frozen=True)
class ScalarMap:
    """Per-pixel scalar map (saliency, attention) in [0, 1]."""

    values: np.ndarray  # (H, W) float32

    def __post_init__(self) -> None:
        if self.values.ndim != 2:
            raise ValueError("ScalarMap.values must have shape (H, W)")
        if self.values.shape[0] < 1 or self.values.shape[1] < 1:
            raise ValueError("ScalarMap dimensions must be positive")
        if self.values.dtype != np.float32:
            raise ValueError("ScalarMap.values must be float32")
        if float(self.values.min(initial=0.0)) < 0.0 or float(self.values.max(initial=0.0)) > 1.0:
            raise ValueError("ScalarMap values must lie in [0, 1]")

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class InpaintMask:
    """Per-pixel binary mask; True marks pixels to inpaint."""

    bits: np.ndarray  # (H, W) bool

    def __post_init__(self) -> None:
        if self.bits.ndim != 2:
            raise ValueError("InpaintMask.bits must have shape (H, W)")
        if self.bits.shape[0] < 1 or self.bits.shape[1] < 1:
            raise ValueError("InpaintMask dimensions must be positive")
        if self.bits.dtype != np.bool_:
            raise ValueError("InpaintMask.bits must be bool")

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    def count(self) -> int:
        return int(self.bits.sum())


Raster = RgbImage | LabelMap | ScalarMap | InpaintMask

_KINDS = ("rgb", "label", "scalar", "mask")


def _open_png(data: bytes) -> Image.Image:
    try:
        img = Image.open(io.BytesIO(data))
        img.load()
    except (UnidentifiedImageError, OSError, ValueError) as exc:
        raise RasterDecodeError(f"cannot decode raster bytes: {exc}") from exc
    if img.format != "PNG":
        raise RasterDecodeError(f"expected PNG data, got {img.format or 'unknown format'}")
    if img.width < 1 or img.height < 1:
        raise RasterDecodeError("raster has zero dimensions")
    return img


def decode_raster(data: bytes, kind: str) -> Raster:
    """Decode 8-bit PNG bytes into the raster type named by `kind`.

    kind: one of "rgb" (3-channel), "label", "scalar", "mask" (grayscale).
    Raises RasterDecodeError on malformed bytes, non-8-bit data or a
    channel count that does not match `kind`.
    """
    if kind not in _KINDS:
        raise ValueError(f"unknown raster kind {kind!r}; expected one of {_KINDS}")
    img = _open_png(data)
    if kind == "rgb":
        if img.mode != "RGB":
            raise RasterDecodeError(f"kind 'rgb' needs a 3-channel 8-bit PNG, got mode {img.mode!r}")
        arr = np.asarray(img, dtype=np.uint8)
        pixels = arr.transpose(2, 0, 1).astype(np.float32) / np.float32(255.0)
        return RgbImage(pixels=pixels)
    if img.mode != "L":
        raise RasterDecodeError(
            f"kind {kind!r} needs a single-channel 8-bit PNG, got mode {img.mode!r}"
        )
    arr = np.asarray(img, dtype=np.uint8)
    if kind == "label":
        return LabelMap(classes=arr.copy())
    if kind == "scalar":
        return ScalarMap(values=arr.astype(np.float32) / np.float32(255.0))
    return InpaintMask(bits=arr >= 128)


def _quantize(values: np.ndarray) -> np.ndarray:
    # round-half-up, deterministic across platforms
    return np.clip(np.floor(values.astype(np.float64) * 255.0 + 0.5), 0, 255).astype(np.uint8)


def encode_raster(raster: Raster) -> bytes:
    """Encode a raster as 8-bit non-interlaced PNG bytes."""
    if isinstance(raster, RgbImage):
        arr = _quantize(raster.pixels).transpose(1, 2, 0)
        img = Image.fromarray(arr, mode="RGB")
    elif isinstance(raster, LabelMap):
        img = Image.fromarray(raster.classes, mode="L")
    elif isinstance(raster, ScalarMap):
        img = Image.fromarray(_quantize(raster.values), mode="L")
    elif isinstance(raster, InpaintMask):
        img = Image.fromarray(np.where(raster.bits, 255, 0).astype(np.uint8), mode="L")
    else:
        raise TypeError(f"not a raster: {type(raster).__name__}")
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


def require_same_shape(*rasters: Raster) -> tuple[int, int]:
    """Return (height, width) shared by all rasters or raise."""
    from .errors import DimensionMismatchError

    shapes = {(r.height, r.width) for r in rasters}
    if len(shapes) != 1:
        detail = ", ".join(f"{type(r).__name__}={r.height}x{r.width}" for r in rasters)
        raise DimensionMismatchError(f"rasters differ in size: {detail}")
    return next(iter(shapes))
