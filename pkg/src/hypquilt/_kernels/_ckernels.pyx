# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the loops in _pykernels; same signatures and results."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, log, hypot, fabs, asinh, fmax, INFINITY

cnp.import_array()


cdef inline void _act1(double a, double b, double c, double d, double x, double y,
                       double* ox, double* oy) noexcept nogil:
    # (a z + b) / (c z + d) for z = x + iy
    cdef double nr = a * x + b, ni = a * y
    cdef double dr = c * x + d, di = c * y
    cdef double den = dr * dr + di * di
    ox[0] = (nr * dr + ni * di) / den
    oy[0] = (ni * dr - nr * di) / den


cdef inline double _dist(double x1, double y1, double x2, double y2) noexcept nogil:
    cdef double dx = x1 - x2
    cdef double s = hypot(dx, y1 - y2)
    cdef double sb = hypot(dx, y1 + y2)
    return 2.0 * log((sb + s) / (2.0 * sqrt(y1 * y2)))


def act_points(double[:, ::1] mats, double x, double y):
    cdef Py_ssize_t n = mats.shape[0], i
    cdef cnp.ndarray[double] gx = np.empty(n)
    cdef cnp.ndarray[double] gy = np.empty(n)
    cdef double ox, oy
    for i in range(n):
        _act1(mats[i, 0], mats[i, 1], mats[i, 2], mats[i, 3], x, y, &ox, &oy)
        gx[i] = ox
        gy[i] = oy
    return gx, gy


def displacements(double[:, ::1] mats, double x, double y):
    cdef Py_ssize_t n = mats.shape[0], i
    cdef cnp.ndarray[double] out = np.empty(n)
    cdef double ox, oy
    with nogil:
        for i in range(n):
            _act1(mats[i, 0], mats[i, 1], mats[i, 2], mats[i, 3], x, y, &ox, &oy)
            out[i] = _dist(x, y, ox, oy)
    return out


def orbit_distances(double[:, ::1] mats, double zx, double zy, double wx, double wy):
    cdef Py_ssize_t n = mats.shape[0], i
    cdef cnp.ndarray[double] out = np.empty(n)
    cdef double ox, oy
    with nogil:
        for i in range(n):
            _act1(mats[i, 0], mats[i, 1], mats[i, 2], mats[i, 3], wx, wy, &ox, &oy)
            out[i] = _dist(zx, zy, ox, oy)
    return out


def orbit_min_distance(double[:, ::1] mats, double zx, double zy, double wx, double wy):
    cdef Py_ssize_t n = mats.shape[0], i, best_i = 0
    cdef double ox, oy, d, best = INFINITY
    with nogil:
        for i in range(n):
            _act1(mats[i, 0], mats[i, 1], mats[i, 2], mats[i, 3], wx, wy, &ox, &oy)
            d = _dist(zx, zy, ox, oy)
            if d < best:
                best = d
                best_i = i
    return best, int(best_i)


def min_dist_to_centered(double[:, ::1] mats, double zx, double zy, double[::1] radii):
    cdef Py_ssize_t n = mats.shape[0], m = radii.shape[0], i, j, bi = 0, bj = 0
    cdef double ox, oy, q, r, d, best = INFINITY
    with nogil:
        for i in range(n):
            # inverse matrix (d, -b, -c, a)
            _act1(mats[i, 3], -mats[i, 1], -mats[i, 2], mats[i, 0], zx, zy, &ox, &oy)
            q = ox * ox + oy * oy
            for j in range(m):
                r = radii[j]
                d = asinh(fabs(q - r * r) / (2.0 * r * oy))
                if d < best:
                    best = d
                    bi = i
                    bj = j
    return best, int(bi), int(bj)


def bisectors(double[:, ::1] mats, double x, double y):
    cdef Py_ssize_t n = mats.shape[0], i
    cdef cnp.ndarray[cnp.npy_bool, cast=True] vert = np.empty(n, dtype=bool)
    cdef cnp.ndarray[double] c = np.empty(n)
    cdef cnp.ndarray[double] r = np.empty(n)
    cdef double gx, gy, dy, cc, const
    for i in range(n):
        _act1(mats[i, 0], mats[i, 1], mats[i, 2], mats[i, 3], x, y, &gx, &gy)
        dy = gy - y
        if fabs(dy) <= 1e-15 * fmax(gy, y):
            vert[i] = True
            c[i] = 0.5 * (x + gx)
            r[i] = 0.0
        else:
            vert[i] = False
            cc = (gy * x - y * gx) / dy
            const = (gy * (x * x + y * y) - y * (gx * gx + gy * gy)) / dy
            c[i] = cc
            r[i] = sqrt(fmax(cc * cc - const, 0.0))
    return vert, c, r
