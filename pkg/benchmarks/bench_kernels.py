#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Times the two hot loops (multi-channel convolution and Jacobi harmonic
fill) plus one full generator inference through each backend. Run:

    python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from wayclear.kernels import _numpy

try:
    from wayclear.kernels import _native
except ImportError:
    _native = None


from wayclear.rasters import InpaintMask, RgbImage


def timeit(fn, repeats: int = 5) -> float:
    best = float("inf")
    for _ in range(repeats):
        started = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - started)
    return best


def bench_conv(backend, rng):
    x = rng.standard_normal((16, 130, 130)).astype(np.float32)
    w = rng.standard_normal((16, 16, 3, 3)).astype(np.float32)
    b = rng.standard_normal(16).astype(np.float32)
    return timeit(lambda: backend.correlate_valid(x, w, b, 1))


def bench_jacobi(backend, rng):
    img = rng.random((3, 128, 128)).astype(np.float32)
    mask = np.zeros((128, 128), dtype=bool)
    mask[40:80, 40:88] = True
    return timeit(lambda: backend.jacobi_fill(img, mask, 1e-5, 400), repeats=3)


def bench_diffusion(rng, backend) -> float:
    # route the end-to-end fill through one backend by patching the dispatcher
    import wayclear.kernels as kernels

    from wayclear.diffusion import diffusion_inpaint

    original = kernels._jacobi
    kernels._jacobi = backend
    try:
        img = RgbImage(pixels=rng.random((3, 128, 128)).astype(np.float32))
        bits = np.zeros((128, 128), dtype=bool)
        bits[40:80, 40:88] = True
        mask = InpaintMask(bits=bits)
        return timeit(lambda: diffusion_inpaint(img, mask, tol=1e-5, max_iters=2000), repeats=3)
    finally:
        kernels._jacobi = original


def main() -> None:
    rng = np.random.default_rng(0)
    rows = []
    for name, fn in (("conv2d 16x130x130 k3", bench_conv), ("jacobi 128x128 hole", bench_jacobi)):
        numpy_t = fn(_numpy, rng)
        native_t = fn(_native, rng) if _native is not None else float("nan")
        rows.append((name, native_t, numpy_t))
    if _native is not None:
        rows.append(
            (
                "diffusion fill 128x128",
                bench_diffusion(rng, _native),
                bench_diffusion(rng, _numpy),
            )
        )

    print(f"{'kernel':30s} {'native (s)':>12s} {'numpy (s)':>12s} {'speedup':>9s}")
    for name, native_t, numpy_t in rows:
        speedup = numpy_t / native_t if native_t == native_t and native_t > 0 else float("nan")
        print(f"{name:30s} {native_t:12.4f} {numpy_t:12.4f} {speedup:8.2f}x")
    print(
        "\ndispatch: jacobi -> compiled extension (loop-bound), "
        "conv2d -> numpy einsum (BLAS-backed; faster than naive compiled loops)"
    )
    if _native is None:
        print("compiled extension not available; showing fallback timings only")


if __name__ == "__main__":
    main()
