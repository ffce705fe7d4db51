"""Weight-free inpainting fallback: harmonic fill by Jacobi iteration.

Masked pixels converge to the solution of the discrete Laplace equation
over their 4-neighborhoods (image borders use the in-bounds neighbors
only), with unmasked pixels as boundary values. Smooth, deterministic,
and good enough to run the full pipeline without a weight container.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .rasters import InpaintMask, RgbImage, require_same_shape

__all__ = ["diffusion_inpaint"]


def diffusion_inpaint(
    img: RgbImage,
    mask: InpaintMask,
    tol: float = 1e-6,
    max_iters: int = 20000,
) -> RgbImage:
    """Fill masked pixels harmonically; unmasked pixels pass through.

    Iteration stops when the largest per-sweep update falls below `tol`
    or after `max_iters` sweeps. Raises ValueError when the mask covers
    the whole image (no boundary values to diffuse from).
    """
    require_same_shape(img, mask)
    if not mask.bits.any():
        return RgbImage(pixels=img.pixels.copy())
    if mask.bits.all():
        raise ValueError("mask covers the entire image; nothing to diffuse from")
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")

    seeded = img.pixels.copy()
    outside = ~mask.bits
    fill_value = seeded[:, outside].mean(axis=1).astype(np.float32)
    seeded[:, mask.bits] = fill_value[:, None]

    filled, _, _ = kernels.jacobi_fill(seeded, mask.bits, tol, max_iters)
    out = np.where(mask.bits[None, :, :], filled, img.pixels)
    return RgbImage(pixels=np.ascontiguousarray(out, dtype=np.float32))
