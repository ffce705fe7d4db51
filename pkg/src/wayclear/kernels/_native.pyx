# Compiled implementations of the hot kernels: valid-mode multi-channel
# cross-correlation and Jacobi harmonic fill. Signatures mirror _numpy.py.

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "native"


def correlate_valid(
    cnp.ndarray[cnp.float32_t, ndim=3] padded,
    cnp.ndarray[cnp.float32_t, ndim=4] weight,
    cnp.ndarray[cnp.float32_t, ndim=1] bias,
    int stride=1,
):
    cdef Py_ssize_t c_in = padded.shape[0]
    cdef Py_ssize_t h = padded.shape[1]
    cdef Py_ssize_t w = padded.shape[2]
    cdef Py_ssize_t c_out = weight.shape[0]
    cdef Py_ssize_t kh = weight.shape[2]
    cdef Py_ssize_t kw = weight.shape[3]
    cdef Py_ssize_t out_h = (h - kh) // stride + 1
    cdef Py_ssize_t out_w = (w - kw) // stride + 1

    cdef cnp.ndarray[cnp.float32_t, ndim=3] out = np.empty(
        (c_out, out_h, out_w), dtype=np.float32
    )
    cdef float[:, :, ::1] x = np.ascontiguousarray(padded)
    cdef float[:, :, :, ::1] wgt = np.ascontiguousarray(weight)
    cdef float[::1] b = np.ascontiguousarray(bias)
    cdef float[:, :, ::1] o = out

    cdef Py_ssize_t oc, ic, oy, ox, ky, kx
    cdef double acc
    with nogil:
        for oc in range(c_out):
            for oy in range(out_h):
                for ox in range(out_w):
                    acc = b[oc]
                    for ic in range(c_in):
                        for ky in range(kh):
                            for kx in range(kw):
                                acc += (
                                    x[ic, oy * stride + ky, ox * stride + kx]
                                    * wgt[oc, ic, ky, kx]
                                )
                    o[oc, oy, ox] = <float> acc
    return out


def jacobi_fill(
    cnp.ndarray[cnp.float32_t, ndim=3] channels,
    cnp.ndarray mask,
    double tol,
    int max_iters,
):
    cdef cnp.ndarray[cnp.float32_t, ndim=3] cur = np.ascontiguousarray(
        channels, dtype=np.float32
    ).copy()
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] m8 = np.ascontiguousarray(
        mask, dtype=np.uint8
    )
    cdef Py_ssize_t c = cur.shape[0]
    cdef Py_ssize_t h = cur.shape[1]
    cdef Py_ssize_t w = cur.shape[2]

    # flat list of masked coordinates; sweep order does not matter for Jacobi
    ys, xs = np.nonzero(m8)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] my = ys.astype(np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] mx = xs.astype(np.int64)
    cdef Py_ssize_t n = my.shape[0]
    if n == 0:
        return cur, 0, 0.0

    cdef cnp.ndarray[cnp.float32_t, ndim=3] nxt = cur.copy()
    cdef float[:, :, ::1] a = cur
    cdef float[:, :, ::1] bb = nxt
    cdef long[::1] yy = my
    cdef long[::1] xx = mx

    cdef Py_ssize_t i, ch, sweep
    cdef long y, x
    cdef float acc, cnt, val, d
    cdef double delta = 0.0
    cdef float[:, :, ::1] tmp

    for sweep in range(1, max_iters + 1):
        delta = 0.0
        with nogil:
            for ch in range(c):
                for i in range(n):
                    y = yy[i]
                    x = xx[i]
                    acc = 0.0
                    cnt = 0.0
                    if y > 0:
                        acc += a[ch, y - 1, x]
                        cnt += 1.0
                    if y < h - 1:
                        acc += a[ch, y + 1, x]
                        cnt += 1.0
                    if x > 0:
                        acc += a[ch, y, x - 1]
                        cnt += 1.0
                    if x < w - 1:
                        acc += a[ch, y, x + 1]
                        cnt += 1.0
                    val = acc / cnt
                    d = val - a[ch, y, x]
                    if d < 0.0:
                        d = -d
                    if d > delta:
                        delta = d
                    bb[ch, y, x] = val
        tmp = a
        a = bb
        bb = tmp
        if delta < tol:
            return np.asarray(a).copy(), sweep, float(delta)
    return np.asarray(a).copy(), max_iters, float(delta)
