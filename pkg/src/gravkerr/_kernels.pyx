# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled two-mode generator actions; same contract as ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


def mz_apply(psi, double plus_scale, double minus_scale):
    cdef const double complex[:, ::1] src = np.ascontiguousarray(psi, dtype=np.complex128)
    cdef Py_ssize_t d1 = src.shape[0], d2 = src.shape[1]
    out_arr = np.zeros((d1, d2), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef double fi, fj, w
    for i in range(d1):
        fi = <double>i
        for j in range(d2):
            fj = <double>j
            if plus_scale != 0.0:
                out[i, j] = plus_scale * (fi * (fi - 1) + fj * (fj - 1) + 4.0 * fi * fj) * src[i, j]
            if minus_scale != 0.0:
                if i >= 2 and j + 2 < d2:
                    w = sqrt(fi * (fi - 1) * (fj + 1) * (fj + 2))
                    out[i, j] = out[i, j] - minus_scale * w * src[i - 2, j + 2]
                if j >= 2 and i + 2 < d1:
                    w = sqrt((fi + 1) * (fi + 2) * fj * (fj - 1))
                    out[i, j] = out[i, j] - minus_scale * w * src[i + 2, j - 2]
    return out_arr


def thg_apply(psi):
    cdef const double complex[:, ::1] src = np.ascontiguousarray(psi, dtype=np.complex128)
    cdef Py_ssize_t d1 = src.shape[0], d2 = src.shape[1]
    out_arr = np.zeros((d1, d2), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef double fi, fj
    for i in range(d1):
        fi = <double>i
        for j in range(d2):
            fj = <double>j
            if i + 3 < d1 and j >= 1:
                out[i, j] = out[i, j] + sqrt((fi + 1) * (fi + 2) * (fi + 3) * fj) * src[i + 3, j - 1]
            if i >= 3 and j + 1 < d2:
                out[i, j] = out[i, j] + sqrt(fi * (fi - 1) * (fi - 2) * (fj + 1)) * src[i - 3, j + 1]
    return out_arr
