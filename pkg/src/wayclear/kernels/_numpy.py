"""Pure-numpy implementations of the hot kernels.

Selected at import when the compiled extension is unavailable or when
WAYCLEAR_PURE_PYTHON is set. Must stay numerically interchangeable with
the native versions (same accumulation order is not guaranteed, so parity
tests use small tolerances).
"""

from __future__ import annotations

import numpy as np

BACKEND = "numpy"


def correlate_valid(
    padded: np.ndarray, weight: np.ndarray, bias: np.ndarray, stride: int = 1
) -> np.ndarray:
    """Valid-mode multi-channel 2-D cross-correlation.

    padded: (C_in, H, W) float32, any required padding already applied.
    weight: (C_out, C_in, kh, kw) float32; bias: (C_out,) float32.
    Returns (C_out, H', W') float32 with H' = (H - kh) // stride + 1.
    """
    c_out, c_in, kh, kw = weight.shape
    windows = np.lib.stride_tricks.sliding_window_view(padded, (kh, kw), axis=(1, 2))
    windows = windows[:, ::stride, ::stride]
    out = np.einsum("ihwkl,oikl->ohw", windows, weight, optimize=True)
    out += bias[:, None, None]
    return np.ascontiguousarray(out, dtype=np.float32)


def jacobi_fill(
    channels: np.ndarray, mask: np.ndarray, tol: float, max_iters: int
) -> tuple[np.ndarray, int, float]:
    """Jacobi sweeps solving the 4-neighbor harmonic fill on masked pixels.

    channels: (C, H, W) float32, masked entries holding the initial guess.
    mask: (H, W) bool. Stops when the max absolute update drops below tol
    or after max_iters sweeps. Unmasked entries are never written.
    Returns (filled, sweeps_run, last_max_update).
    """
    u = channels.astype(np.float32, copy=True)
    if not mask.any():
        return u, 0, 0.0
    h, w = mask.shape
    counts = np.full((h, w), 4.0, dtype=np.float32)
    counts[0, :] -= 1.0
    counts[-1, :] -= 1.0
    counts[:, 0] -= 1.0
    counts[:, -1] -= 1.0
    masked = mask[None, :, :]
    delta = 0.0
    for sweep in range(1, max_iters + 1):
        s = np.zeros_like(u)
        s[:, 1:, :] += u[:, :-1, :]
        s[:, :-1, :] += u[:, 1:, :]
        s[:, :, 1:] += u[:, :, :-1]
        s[:, :, :-1] += u[:, :, 1:]
        new = s / counts
        diff = np.abs(new - u, where=masked, out=np.zeros_like(u))
        delta = float(diff.max())
        u = np.where(masked, new, u)
        if delta < tol:
            return u, sweep, delta
    return u, max_iters, delta
