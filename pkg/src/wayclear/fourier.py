"""Real 2-D FFT with a pinned normalization convention.

Forward transform is unnormalized; the inverse divides by H*W, so
irfft2(rfft2(x), x.shape) == x up to float rounding. Spectra use the real
half-spectrum layout (W//2 + 1 columns) per channel.
"""

from __future__ import annotations

import numpy as np

__all__ = ["rfft2", "irfft2", "spectrum_energy"]


def rfft2(tensor: np.ndarray) -> np.ndarray:
    """Per-channel forward real 2-D DFT; (C, H, W) -> (C, H, W//2+1) complex."""
    if tensor.ndim != 3:
        raise ValueError(f"expected (C, H, W) input, got shape {tensor.shape}")
    if tensor.shape[1] < 1 or tensor.shape[2] < 1:
        raise ValueError("spatial dimensions must be >= 1")
    return np.fft.rfft2(tensor.astype(np.float64, copy=False), axes=(-2, -1))


def irfft2(spectrum: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    """Inverse of rfft2 for the given spatial shape; returns float32."""
    if spectrum.ndim != 3:
        raise ValueError(f"expected (C, H, W//2+1) spectrum, got shape {spectrum.shape}")
    h, w = shape
    out = np.fft.irfft2(spectrum, s=(h, w), axes=(-2, -1))
    return np.ascontiguousarray(out, dtype=np.float32)


def spectrum_energy(spectrum: np.ndarray, width: int) -> float:
    """Total |X|^2 over the full spectrum implied by a half-spectrum.

    Columns other than DC (and Nyquist, when width is even) appear twice in
    the full spectrum by conjugate symmetry.
    """
    mags = np.abs(spectrum) ** 2
    weights = np.full(spectrum.shape[-1], 2.0)
    weights[0] = 1.0
    if width % 2 == 0:
        weights[-1] = 1.0
    return float((mags * weights).sum())
