"""Pure numpy versions of the two-mode generator actions.

Amplitude arrays are indexed ``psi[n_a, n_b]``.  Every routine returns the
action of the generator projected back onto the truncated grid.
"""
import numpy as np


def mz_apply(psi, plus_scale, minus_scale):
    psi = np.ascontiguousarray(psi, dtype=np.complex128)
    d1, d2 = psi.shape
    out = np.zeros_like(psi)
    i = np.arange(d1, dtype=np.float64)[:, None]
    j = np.arange(d2, dtype=np.float64)[None, :]
    if plus_scale != 0.0:
        out += plus_scale * (i * (i - 1) + j * (j - 1) + 4.0 * i * j) * psi
    if minus_scale != 0.0 and d1 > 2 and d2 > 2:
        ia = np.arange(2, d1, dtype=np.float64)[:, None]
        jb = np.arange(0, d2 - 2, dtype=np.float64)[None, :]
        # a^2 b^2 dagger-pairs: (i-2, j+2) -> (i, j)
        w = np.sqrt(ia * (ia - 1) * (jb + 1) * (jb + 2))
        out[2:, :-2] -= minus_scale * w * psi[:-2, 2:]
        # (i+2, j-2) -> (i, j) uses the same weights transposed in role
        out[:-2, 2:] -= minus_scale * w * psi[2:, :-2]
    return out


def thg_apply(psi):
    psi = np.ascontiguousarray(psi, dtype=np.complex128)
    d1, d2 = psi.shape
    out = np.zeros_like(psi)
    if d1 > 3 and d2 > 1:
        ia = np.arange(3, d1, dtype=np.float64)[:, None]
        jb = np.arange(0, d2 - 1, dtype=np.float64)[None, :]
        w = np.sqrt(ia * (ia - 1) * (ia - 2) * (jb + 1))
        # a^3 b^dag: (i+3, j-1) -> (i, j)
        out[:-3, 1:] += w * psi[3:, :-1]
        # a^dag^3 b: (i-3, j+1) -> (i, j)
        out[3:, :-1] += w * psi[:-3, 1:]
    return out
