"""Action of exp(i t H) on a vector for Hermitian H given only as a matvec.

Lanczos with full reorthogonalisation.  The angle is split into substeps
whenever the Krylov space of size ``m_max`` does not reach ``tol``.
"""
import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import SeriesError

_EPS = np.finfo(float).eps


def _lanczos_step(matvec, v, t, tol, m_max):
    beta0 = np.linalg.norm(v)
    if beta0 == 0.0:
        return np.zeros_like(v), 0.0
    n = v.size
    m_max = min(m_max, n)
    V = np.zeros((m_max + 1, n), dtype=np.complex128)
    alpha = np.zeros(m_max)
    beta = np.zeros(m_max)
    V[0] = v / beta0
    residual = np.inf
    for j in range(m_max):
        w = matvec(V[j])
        alpha[j] = np.vdot(V[j], w).real
        w = w - alpha[j] * V[j]
        if j > 0:
            w = w - beta[j - 1] * V[j - 1]
        # full reorthogonalisation keeps the tridiagonal projection honest
        w = w - V[: j + 1].T @ (V[: j + 1].conj() @ w)
        beta[j] = np.linalg.norm(w)
        m = j + 1
        if m == 1:
            evals, evecs = np.array([alpha[0]]), np.ones((1, 1))
        else:
            evals, evecs = eigh_tridiagonal(alpha[:m], beta[: m - 1])
        coeffs = evecs @ (np.exp(1j * t * evals) * evecs[0].conj())
        # standard a-posteriori estimate: beta_m * |last Krylov coefficient|
        residual = beta0 * beta[j] * abs(coeffs[-1])
        # once the last coefficient is at rounding level, more vectors cannot help
        at_rounding = abs(coeffs[-1]) <= 4 * m * _EPS
        if beta[j] < 1e-14 * max(1.0, abs(alpha[: m]).max()) or residual < tol or at_rounding:
            return beta0 * (coeffs @ V[:m]), residual
        V[j + 1] = w / beta[j]
    return None, residual


def expm_hermitian_action(matvec, v, angle, tol=1e-13, m_max=40, max_substeps=4096):
    """Return exp(i * angle * H) @ v, where ``matvec(x) = H @ x``."""
    v = np.asarray(v, dtype=np.complex128).ravel()
    if angle == 0.0:
        return v.copy()
    # the per-step share of tol cannot go below what double precision resolves
    floor = 8 * _EPS * np.linalg.norm(v)
    substeps = 1
    while substeps <= max_substeps:
        out = v
        dt = angle / substeps
        ok = True
        worst = 0.0
        for _ in range(substeps):
            out, res = _lanczos_step(matvec, out, dt, max(tol / substeps, floor), m_max)
            worst = max(worst, res)
            if out is None:
                ok = False
                break
        if ok:
            return out
        substeps *= 4
    raise SeriesError(f"Krylov exponential did not converge (residual {worst:.3e})", residual=worst)
