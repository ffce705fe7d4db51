"""Hot-loop kernels: compiled core with a pure-numpy fallback.

Dispatch is per kernel, by measurement (see benchmarks/bench_kernels.py):
the Jacobi harmonic fill is loop-bound and runs ~12x faster in the
compiled extension, while multi-channel convolution is fastest through
numpy's einsum (it lowers to BLAS sgemm, which naive compiled loops do
not beat). Set WAYCLEAR_PURE_PYTHON=1 to force the numpy implementations
everywhere; the package behaves identically either way.
"""

from __future__ import annotations

import os

import numpy as np

from . import _numpy

if os.environ.get("WAYCLEAR_PURE_PYTHON"):
    _native = None
else:
    try:
        from . import _native  # type: ignore[attr-defined]
    except ImportError:
        _native = None

_conv = _numpy
_jacobi = _native if _native is not None else _numpy

__all__ = ["backend_name", "extension_loaded", "conv2d", "jacobi_fill"]


def extension_loaded() -> bool:
    """True when the compiled extension is active for the loop-bound kernels."""
    return _native is not None


def backend_name() -> str:
    """"native" when the compiled extension is active, else "numpy"."""
    return "native" if _native is not None else "numpy"


def conv2d(
    x: np.ndarray,
    weight: np.ndarray,
    bias: np.ndarray,
    stride: int = 1,
    padding: int = 0,
    pad_mode: str = "reflect",
) -> np.ndarray:
    """2-D cross-correlation over channel-major tensors.

    x: (C_in, H, W) float32; weight: (C_out, C_in, kh, kw); bias: (C_out,).
    `padding` pixels are added on each spatial side with `pad_mode`
    semantics (numpy.pad modes) before the valid-mode correlation.
    """
    if x.ndim != 3:
        raise ValueError(f"conv2d input must be (C, H, W), got shape {x.shape}")
    if weight.ndim != 4 or weight.shape[1] != x.shape[0]:
        raise ValueError(
            f"weight shape {weight.shape} does not accept {x.shape[0]} input channels"
        )
    if bias.shape != (weight.shape[0],):
        raise ValueError(f"bias shape {bias.shape} does not match {weight.shape[0]} outputs")
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    x = np.ascontiguousarray(x, dtype=np.float32)
    if padding > 0:
        x = np.pad(x, ((0, 0), (padding, padding), (padding, padding)), mode=pad_mode)
    kh, kw = weight.shape[2], weight.shape[3]
    if x.shape[1] < kh or x.shape[2] < kw:
        raise ValueError(f"input {x.shape} smaller than kernel {kh}x{kw} after padding")
    return _conv.correlate_valid(
        x,
        np.ascontiguousarray(weight, dtype=np.float32),
        np.ascontiguousarray(bias, dtype=np.float32),
        stride,
    )


def jacobi_fill(
    channels: np.ndarray, mask: np.ndarray, tol: float, max_iters: int
) -> tuple[np.ndarray, int, float]:
    """Solve the 4-neighbor harmonic fill on masked pixels by Jacobi sweeps.

    channels: (C, H, W) float32 with initial guesses at masked entries;
    mask: (H, W) bool. Returns (filled, sweeps_run, last_max_update);
    unmasked entries pass through bit-identical.
    """
    if channels.ndim != 3 or mask.shape != channels.shape[1:]:
        raise ValueError(
            f"channels {channels.shape} and mask {mask.shape} are inconsistent"
        )
    if max_iters < 0:
        raise ValueError("max_iters must be >= 0")
    return _jacobi.jacobi_fill(
        np.ascontiguousarray(channels, dtype=np.float32),
        np.ascontiguousarray(mask, dtype=bool),
        float(tol),
        int(max_iters),
    )
