"""Hermitian generators of the cavity evolutions and the unitaries they produce.

All unitaries follow exp(+i * angle * G).  Two-mode operators act on amplitude
matrices ``psi[n_a, n_b]``; the pair-exchange and harmonic-conversion
generators carry a structural action backed by :mod:`gravkerr.kernels`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.linalg import expm
from scipy.sparse.linalg import expm_multiply

from . import kernels
from .errors import DimensionMismatchError, InvalidDimensionError, SeriesError
from .fock import (
    OperatorMatrix,
    SingleModeState,
    TwoModeState,
    _check_dim,
    annihilation,
    number_operator,
)
from .krylov import expm_hermitian_action

CONVENTIONS = {"half": 0.5, "unhalved": 1.0}
# largest flattened two-mode space handled by the materialised sparse exponential
_SPARSE_EXPM_LIMIT = 64 * 64


@dataclass(frozen=True)
class GeneratorSet:
    g_quantum: OperatorMatrix
    g_classical: OperatorMatrix
    labels: tuple[str, str] = ("G_Q", "G_C")

    def __iter__(self):
        return iter((self.g_quantum, self.g_classical))


def kerr_generator(dim: int) -> OperatorMatrix:
    """a^dag a^dag a a, diagonal with n(n-1)."""
    dim = _check_dim(dim)
    n = np.arange(dim, dtype=float)
    return OperatorMatrix(sparse.diags(n * (n - 1)), structure="diagonal", hermitian=True, label="G_Q")


def number_generator(dim: int) -> OperatorMatrix:
    op = number_operator(dim)
    return OperatorMatrix(op.entries, structure="diagonal", hermitian=True, label="G_C")


def single_mode_generators(dim: int) -> GeneratorSet:
    return GeneratorSet(kerr_generator(dim), number_generator(dim))


def evolve_kerr(state: SingleModeState, chi_q: float, chi_c: float) -> SingleModeState:
    """exp(i chi_q a^dag a^dag a a) exp(i chi_c a^dag a) |psi>."""
    n = np.arange(state.dim, dtype=float)
    phase = np.exp(1j * (chi_q * n * (n - 1) + chi_c * n))
    return state.with_amplitudes(state.amplitudes * phase)


def evolve_single_mode(state: SingleModeState, generator: OperatorMatrix, angle: float) -> SingleModeState:
    if generator.mode_dims != state.mode_dims:
        raise DimensionMismatchError("generator and state dimensions differ")
    if generator.structure == "diagonal":
        return state.with_amplitudes(np.exp(1j * angle * generator.diagonal()) * state.amplitudes)
    if state.dim <= 256:
        u = expm(1j * angle * generator.entries.toarray())
        return state.with_amplitudes(u @ state.amplitudes)
    out = expm_hermitian_action(lambda x: generator.entries @ x, state.amplitudes, angle)
    return state.with_amplitudes(out)


# ---------------------------------------------------------------------------
# two-mode operators


def _two_mode_dims(dim, dim_b=None):
    d1 = _check_dim(dim)
    d2 = d1 if dim_b is None else _check_dim(dim_b)
    return d1, d2


def mode_operator(single: OperatorMatrix, mode: str, dims) -> OperatorMatrix:
    """Embed a single-mode operator into mode ``"a"`` or ``"b"``."""
    d1, d2 = dims
    if mode == "a":
        entries = sparse.kron(single.entries, sparse.identity(d2), format="csr")
    elif mode == "b":
        entries = sparse.kron(sparse.identity(d1), single.entries, format="csr")
    else:
        raise ValueError(f"mode must be 'a' or 'b', got {mode!r}")
    return OperatorMatrix(entries, structure=single.structure, hermitian=single.hermitian,
                          mode_dims=(d1, d2), label=f"{single.label}_{mode}")


def two_mode_number(dim: int, mode: str, dim_b: int | None = None) -> OperatorMatrix:
    dims = _two_mode_dims(dim, dim_b)
    return mode_operator(number_operator(dims[0] if mode == "a" else dims[1]), mode, dims)


def kerr_pair_generator(dim: int) -> OperatorMatrix:
    """Kerr terms of both cavities, a^dag^2 a^2 + b^dag^2 b^2."""
    d1, d2 = _two_mode_dims(dim)
    return mode_operator(kerr_generator(d1), "a", (d1, d2)) + mode_operator(kerr_generator(d2), "b", (d1, d2))


def beamsplitter_generator(dim: int) -> OperatorMatrix:
    """a^dag b + b^dag a."""
    d = _check_dim(dim)
    a = annihilation(d).entries
    ad = a.conj().T
    j = sparse.kron(ad, a) + sparse.kron(a, ad)
    return OperatorMatrix(j, structure="banded", hermitian=True, mode_dims=(d, d), label="J")


def _mz_sparse(d1, d2, plus_scale, minus_scale):
    i, j = np.indices((d1, d2))
    i = i.ravel().astype(float)
    j = j.ravel().astype(float)
    flat = np.arange(d1 * d2)
    rows = [flat]
    cols = [flat]
    vals = [plus_scale * (i * (i - 1) + j * (j - 1) + 4.0 * i * j)]
    if minus_scale != 0.0:
        # (i, j) -> (i + 2, j - 2) with weight sqrt((i+1)(i+2) j (j-1))
        mask = (i + 2 < d1) & (j >= 2)
        src = flat[mask]
        dst = src + 2 * d2 - 2
        w = np.sqrt((i[mask] + 1) * (i[mask] + 2) * j[mask] * (j[mask] - 1))
        rows += [dst, src]
        cols += [src, dst]
        vals += [-minus_scale * w, -minus_scale * w]
    m = sparse.coo_array((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                         shape=(d1 * d2, d1 * d2))
    m = m.tocsr()
    m.eliminate_zeros()
    return m


@dataclass(frozen=True)
class ComposedGenerator:
    """Generator of the full beamsplitter-Kerr-beamsplitter sequence, G = G_plus + G_minus."""

    total: OperatorMatrix
    plus: OperatorMatrix
    minus: OperatorMatrix
    convention: str


def mz_composed_generator(dim: int, convention: str = "half") -> ComposedGenerator:
    """Pair-exchange generator of the interferometer with Kerr-active arms.

    With ``convention="half"`` the overall 1/2 is kept, so that
    U_BS^dag (K_a + K_b) U_BS equals ``total``.  ``"unhalved"`` drops it in
    both parts (``total`` is then twice the conjugated Kerr generator).
    """
    if convention not in CONVENTIONS:
        raise ValueError(f"convention must be one of {sorted(CONVENTIONS)}")
    s = CONVENTIONS[convention]
    d1, d2 = _two_mode_dims(dim)
    dims = (d1, d2)
    mz = kernels.mz_apply
    total = OperatorMatrix(_mz_sparse(d1, d2, s, s), structure="banded", hermitian=True, mode_dims=dims,
                           label="G", action=lambda psi: mz(psi, s, s))
    plus = OperatorMatrix(_mz_sparse(d1, d2, s, 0.0), structure="diagonal", hermitian=True, mode_dims=dims,
                          label="G_plus", action=lambda psi: mz(psi, s, 0.0))
    minus = OperatorMatrix(_mz_sparse(d1, d2, 0.0, s), structure="banded", hermitian=True, mode_dims=dims,
                           label="G_minus", action=lambda psi: mz(psi, 0.0, s))
    return ComposedGenerator(total, plus, minus, convention)


def _total_number(dim):
    i, j = np.indices((dim, dim))
    return (i + j).ravel()


def beamsplitter_conjugation_check(dim: int, beamsplitter: str = "complex") -> float:
    """Max-norm residual between U^dag (K_a + K_b) U and the composed generator.

    ``beamsplitter`` selects U: ``"complex"`` is exp(-i pi/4 (a^dag b + b^dag a)),
    ``"complex-conjugate"`` flips the sign of the angle, ``"real"`` is the
    rotation exp(pi/4 (a^dag b - b^dag a)).  Only the block of total photon
    number below ``dim`` is compared, since higher blocks are cut by the
    truncation.
    """
    d = _check_dim(dim)
    if d > 64:
        raise InvalidDimensionError("dense conjugation check is limited to dim <= 64")
    a = annihilation(d).entries.toarray()
    eye = np.eye(d)
    A = np.kron(a, eye)
    B = np.kron(eye, a)
    if beamsplitter == "complex":
        gen = -1j * math.pi / 4 * (A.conj().T @ B + B.conj().T @ A)
    elif beamsplitter == "complex-conjugate":
        gen = 1j * math.pi / 4 * (A.conj().T @ B + B.conj().T @ A)
    elif beamsplitter == "real":
        gen = math.pi / 4 * (A.conj().T @ B - B.conj().T @ A)
    else:
        raise ValueError(f"unknown beamsplitter convention {beamsplitter!r}")
    u = expm(gen)
    kerr = kerr_pair_generator(d).dense()
    conj = u.conj().T @ kerr @ u
    target = mz_composed_generator(d, "half").total.dense()
    keep = _total_number(d) < d
    diff = (conj - target)[np.ix_(keep, keep)]
    return float(np.abs(diff).max())


def thg_generator(dim_pump: int, dim_harmonic: int) -> OperatorMatrix:
    """Harmonic conversion a^3 b^dag + a^dag^3 b (pump a at w0, harmonic b at 3 w0)."""
    d1 = _check_dim(dim_pump)
    d2 = _check_dim(dim_harmonic)
    if d1 < 4 or d2 < 2:
        raise InvalidDimensionError("third-harmonic generator needs dim_pump >= 4 and dim_harmonic >= 2")
    a = annihilation(d1).entries
    b = annihilation(d2).entries
    a3 = a @ a @ a
    g = sparse.kron(a3, b.conj().T) + sparse.kron(a3.conj().T, b)
    return OperatorMatrix(g, structure="banded", hermitian=True, mode_dims=(d1, d2), label="G_THG",
                          action=kernels.thg_apply)


def evolve_two_mode(state: TwoModeState, generator: OperatorMatrix, angle: float,
                    method: str = "auto", tol: float = 1e-13) -> TwoModeState:
    """exp(i angle G) |psi> for a Hermitian two-mode generator.

    ``method``: ``"sparse"`` (materialised sparse exponential action),
    ``"krylov"`` (Lanczos on the structural action) or ``"auto"``.
    """
    if tuple(generator.mode_dims) != tuple(state.mode_dims):
        raise DimensionMismatchError(f"generator dims {generator.mode_dims} vs state {state.mode_dims}")
    if angle == 0.0:
        return state
    psi = state.amplitudes.ravel()
    if method == "auto":
        method = "sparse" if psi.size <= _SPARSE_EXPM_LIMIT else "krylov"
    if method == "sparse":
        out = expm_multiply(1j * angle * generator.entries, psi)
    elif method == "krylov":
        shape = state.amplitudes.shape
        out = expm_hermitian_action(lambda x: generator.apply(x.reshape(shape)).ravel(), psi, angle, tol=tol)
    else:
        raise ValueError(f"unknown method {method!r}")
    before = np.vdot(psi, psi).real
    after = np.vdot(out, out).real
    if abs(after - before) > 1e-10:
        raise SeriesError(f"evolution changed the norm by {after - before:.3e}", residual=abs(after - before))
    return state.with_amplitudes(out)
