# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled backward capture recursion.

Same contract as ``_pykernels``; ``capture_field`` additionally restricts
each sweep to the bounding box of the current support.
"""
import numpy as np
cimport numpy as cnp

cnp.import_array()

NAME = "cython"


cdef inline void _clamp(double[:, ::1] f, Py_ssize_t W, Py_ssize_t a, Py_ssize_t b) noexcept nogil:
    f[a, b] = 1.0
    if a + 1 < W:
        f[a + 1, b] = 1.0
    if a >= 1:
        f[a - 1, b] = 1.0
    if b + 1 < W:
        f[a, b + 1] = 1.0
    if b >= 1:
        f[a, b - 1] = 1.0


cdef void _sweep(double[:, ::1] old, double[:, ::1] new,
                 Py_ssize_t a, Py_ssize_t b,
                 Py_ssize_t x0, Py_ssize_t x1, Py_ssize_t y0, Py_ssize_t y1) noexcept nogil:
    cdef Py_ssize_t i, j, ih, jh
    for i in range(x0, x1 + 1):
        if i < a:
            ih = i + 1
        elif i > a:
            ih = i - 1
        else:
            ih = i
        for j in range(y0, y1 + 1):
            if j < b:
                jh = j + 1
            elif j > b:
                jh = j - 1
            else:
                jh = j
            if i == a:
                new[i, j] = old[i, jh]
            elif j == b:
                new[i, j] = old[ih, j]
            else:
                new[i, j] = 0.5 * (old[ih, j] + old[i, jh])


def step_back(old, Py_ssize_t M, Py_ssize_t sx, Py_ssize_t sy, out=None):
    cdef Py_ssize_t W = 2 * M + 1
    cdef Py_ssize_t a = sx + M, b = sy + M
    if not (0 <= a < W and 0 <= b < W):
        raise ValueError(f"survivor position ({sx}, {sy}) outside the window of radius {M}")
    cdef double[:, ::1] src = np.ascontiguousarray(old, dtype=np.float64)
    if out is None:
        out = np.empty((W, W), dtype=np.float64)
    cdef double[:, ::1] dst = out
    with nogil:
        _sweep(src, dst, a, b, 0, W - 1, 0, W - 1)
        _clamp(dst, W, a, b)
    return out


def capture_field(xs, ys, Py_ssize_t M):
    cdef Py_ssize_t W = 2 * M + 1
    cdef cnp.int64_t[::1] px = np.ascontiguousarray(xs, dtype=np.int64)
    cdef cnp.int64_t[::1] py = np.ascontiguousarray(ys, dtype=np.int64)
    cur_arr = np.zeros((W, W), dtype=np.float64)
    nxt_arr = np.zeros((W, W), dtype=np.float64)
    cdef double[:, ::1] cur = cur_arr
    cdef double[:, ::1] nxt = nxt_arr
    cdef double[:, ::1] tmp
    cdef Py_ssize_t i, a, b
    cdef Py_ssize_t x0, x1, y0, y1
    a = px[M] + M
    b = py[M] + M
    if not (0 <= a < W and 0 <= b < W):
        raise ValueError("terminal position outside the window")
    for i in range(1, M):
        if not (0 <= px[i] + M < W and 0 <= py[i] + M < W):
            raise ValueError(f"survivor position ({px[i]}, {py[i]}) outside the window of radius {M}")
    x0 = a - 1 if a >= 1 else 0
    x1 = a + 1 if a + 1 < W else W - 1
    y0 = b - 1 if b >= 1 else 0
    y1 = b + 1 if b + 1 < W else W - 1
    with nogil:
        _clamp(cur, W, a, b)
        for i in range(M - 1, 0, -1):
            a = px[i] + M
            b = py[i] + M
            # support grows by at most one cell per side, plus the clamped cross
            x0 = x0 - 1 if x0 >= 1 else 0
            x1 = x1 + 1 if x1 + 1 < W else W - 1
            y0 = y0 - 1 if y0 >= 1 else 0
            y1 = y1 + 1 if y1 + 1 < W else W - 1
            if a - 1 < x0:
                x0 = a - 1 if a >= 1 else 0
            if a + 1 > x1:
                x1 = a + 1 if a + 1 < W else W - 1
            if b - 1 < y0:
                y0 = b - 1 if b >= 1 else 0
            if b + 1 > y1:
                y1 = b + 1 if b + 1 < W else W - 1
            _sweep(cur, nxt, a, b, x0, x1, y0, y1)
            _clamp(nxt, W, a, b)
            tmp = cur
            cur = nxt
            nxt = tmp
    return np.asarray(cur)
