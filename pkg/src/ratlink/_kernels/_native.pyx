# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: batched polynomial evaluation and segment distances."""
import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()

IMPLEMENTATION = "native"


def polyvec_eval(coeffs, ts):
    """Evaluate a vector-valued polynomial at many parameters (Horner)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] C = np.ascontiguousarray(coeffs, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] T = np.ascontiguousarray(ts, dtype=np.float64)
    cdef Py_ssize_t n = T.shape[0], m = C.shape[1], deg = C.shape[0] - 1
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((n, m), dtype=np.float64)
    cdef Py_ssize_t i, j, k
    cdef double t, acc
    for i in range(n):
        t = T[i]
        for j in range(m):
            acc = C[deg, j]
            for k in range(deg - 1, -1, -1):
                acc = acc * t + C[k, j]
            out[i, j] = acc
    return out


def segment_min_distances(p0, p1, q0, q1):
    """Minimum distances between segment batches [p0,p1] and [q0,q1]."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] P0 = np.ascontiguousarray(p0, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] P1 = np.ascontiguousarray(p1, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] Q0 = np.ascontiguousarray(q0, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] Q1 = np.ascontiguousarray(q1, dtype=np.float64)
    cdef Py_ssize_t n = P0.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t i, k
    cdef double d1[3]
    cdef double d2[3]
    cdef double r[3]
    cdef double a, b, c, e, f, denom, s, t, cx, cy, cz
    cdef double tiny = 1e-30
    for i in range(n):
        a = 0.0; b = 0.0; c = 0.0; e = 0.0; f = 0.0
        for k in range(3):
            d1[k] = P1[i, k] - P0[i, k]
            d2[k] = Q1[i, k] - Q0[i, k]
            r[k] = P0[i, k] - Q0[i, k]
        for k in range(3):
            a += d1[k] * d1[k]
            e += d2[k] * d2[k]
            b += d1[k] * d2[k]
            c += d1[k] * r[k]
            f += d2[k] * r[k]
        denom = a * e - b * b
        if denom > tiny:
            s = (b * f - c * e) / denom
            if s < 0.0:
                s = 0.0
            elif s > 1.0:
                s = 1.0
        else:
            s = 0.0
        if e > tiny:
            t = (b * s + f) / e
        else:
            t = 0.0
        if t < 0.0:
            t = 0.0
            if a > tiny:
                s = -c / a
                if s < 0.0:
                    s = 0.0
                elif s > 1.0:
                    s = 1.0
            else:
                s = 0.0
        elif t > 1.0:
            t = 1.0
            if a > tiny:
                s = (b - c) / a
                if s < 0.0:
                    s = 0.0
                elif s > 1.0:
                    s = 1.0
            else:
                s = 0.0
        if a <= tiny:
            s = 0.0
        cx = P0[i, 0] + s * d1[0] - Q0[i, 0] - t * d2[0]
        cy = P0[i, 1] + s * d1[1] - Q0[i, 1] - t * d2[1]
        cz = P0[i, 2] + s * d1[2] - Q0[i, 2] - t * d2[2]
        out[i] = sqrt(cx * cx + cy * cy + cz * cz)
    return out
