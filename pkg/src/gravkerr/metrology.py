"""Fisher information, Cramer-Rao bounds, quadrature cumulants and scaling fits.

The quantum Fisher information matrix is computed per shot, F_ij =
4 tau^2 Cov(G_i, G_j), with tau = 1 unless stated.  Parameters are ordered
(quantum, classical) throughout, so ``[F^-1][0, 0]`` is the nuisance-aware
variance of the quantum phase.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.stats import linregress

from .errors import ContractViolation, PreconditionError, SingularMatrixError
from .fock import (
    OutcomeDistribution,
    SingleModeState,
    TwoModeState,
    make_coherent,
    make_squeezed_vacuum,
    make_tmsv,
    make_vacuum,
    product_state,
    quadrature,
)
from .constants import DEFAULT_TOLERANCE
from .generators import (
    CONVENTIONS,
    GeneratorSet,
    evolve_two_mode,
    mz_composed_generator,
    single_mode_generators,
    thg_generator,
)

SINGULAR_THRESHOLD = 1e-12
# cumulants respond to the dropped amplitude (square root of the tail mass),
# so states fed to them are truncated this much tighter
CUMULANT_TOLERANCE = 1e-20


# ---------------------------------------------------------------------------
# quantum Fisher information


def _normalised_norm(state):
    norm = state.norm_sq()
    if abs(norm - 1.0) > state.tail_bound + 1e-10:
        raise ContractViolation(
            f"state norm^2 {norm:.12f} is outside 1 - tail_bound ({state.tail_bound:.1e})"
        )
    return norm


def covariance_matrix(state, generators) -> np.ndarray:
    """Symmetrised covariance 1/2<AB + BA> - <A><B> of Hermitian generators."""
    norm = _normalised_norm(state)
    psi = state.amplitudes
    images = [g.apply(psi).ravel() for g in generators]
    flat = psi.ravel()
    means = np.array([np.vdot(flat, v).real / norm for v in images])
    k = len(images)
    cov = np.empty((k, k))
    for i in range(k):
        for j in range(i, k):
            cov[i, j] = cov[j, i] = np.vdot(images[i], images[j]).real / norm - means[i] * means[j]
    return cov


def qfim(state, generators, tau: float = 1.0) -> np.ndarray:
    return 4.0 * tau**2 * covariance_matrix(state, generators)


def analytic_sqvac_qfim(N: float):
    """Closed-form QFIM of squeezed vacuum w.r.t. (Kerr, number) and its inverse."""
    if N <= 0:
        raise SingularMatrixError("squeezed-vacuum QFIM is singular at N = 0")
    F = np.array([
        [8 * N * (48 * N**3 + 72 * N**2 + 25 * N + 1), 8 * N * (6 * N**2 + 7 * N + 1)],
        [8 * N * (6 * N**2 + 7 * N + 1), 8 * N * (N + 1)],
    ])
    F_inv = np.array([
        [1.0, -6 * N - 1],
        [-6 * N - 1, 24 * N * (2 * N + 1) + 1],
    ]) / (96 * N**2 * (N + 1) ** 2)
    return F, F_inv


def analytic_coherent_qfim(N: float) -> np.ndarray:
    """Closed-form QFIM of a coherent state with mean photon number N."""
    return 4.0 * np.array([[4 * N**3 + 2 * N**2, 2 * N**2], [2 * N**2, N]])


def is_singular(F: np.ndarray, threshold: float = SINGULAR_THRESHOLD) -> bool:
    evals = np.linalg.eigvalsh(np.asarray(F, dtype=float))
    largest = evals.max()
    return bool(largest <= 0.0 or evals.min() < threshold * largest)


def inverse_qfim(F: np.ndarray, threshold: float = SINGULAR_THRESHOLD):
    """Inverse, or ``None`` when the matrix counts as singular."""
    if is_singular(F, threshold):
        return None
    return np.linalg.inv(F)


def nuisance_qcrb(F: np.ndarray, M: float = 1.0, threshold: float = SINGULAR_THRESHOLD) -> float:
    """Smallest detectable quantum phase, sqrt([F^-1]_QQ / M).

    Returns ``math.inf`` when the QFIM is not invertible: the quantum
    signature is then indistinguishable from the classical one.
    """
    F_inv = inverse_qfim(F, threshold)
    if F_inv is None:
        return math.inf
    return math.sqrt(F_inv[0, 0] / M)


def single_parameter_qcrb(F: np.ndarray, M: float = 1.0) -> float:
    """Bound ignoring the nuisance parameter, 1/sqrt(M F_QQ)."""
    fqq = float(np.asarray(F)[0, 0])
    return math.inf if fqq <= 0 else 1.0 / math.sqrt(M * fqq)


@dataclass
class MetrologyReport:
    qfim: np.ndarray
    qfim_inverse: np.ndarray | None
    qcrb_nuisance: float
    generator_labels: tuple[str, ...]
    state_descriptor: str
    convention_flags: dict[str, str] = field(default_factory=dict)
    shots: float = 1.0

    @property
    def indistinguishable(self) -> bool:
        return self.qfim_inverse is None

    def to_dict(self) -> dict:
        return {
            "state_descriptor": self.state_descriptor,
            "generator_labels": list(self.generator_labels),
            "shots": float(self.shots),
            "qfim": [float(x) for x in np.asarray(self.qfim).ravel()],
            "qfim_inverse": None if self.qfim_inverse is None else [float(x) for x in self.qfim_inverse.ravel()],
            "qcrb_nuisance": "indistinguishable" if math.isinf(self.qcrb_nuisance) else float(self.qcrb_nuisance),
            "convention_flags": {k: str(v) for k, v in self.convention_flags.items()},
        }


def metrology_report(state, generators: GeneratorSet | None = None, M: float = 1.0, tau: float = 1.0,
                     state_descriptor: str = "", convention_flags=None) -> MetrologyReport:
    if generators is None:
        generators = single_mode_generators(state.dim)
    F = qfim(state, generators, tau)
    F_inv = inverse_qfim(F)
    bound = math.inf if F_inv is None else math.sqrt(F_inv[0, 0] / M)
    flags = {"tau": "per-shot" if tau == 1.0 else f"{tau!r}"}
    flags.update(convention_flags or {})
    labels = tuple(getattr(generators, "labels", None) or [g.label for g in generators])
    return MetrologyReport(F, F_inv, bound, labels, state_descriptor, flags, M)


# ---------------------------------------------------------------------------
# interferometric photon counting


@lru_cache(maxsize=512)
def _bs_block(ntot: int, sign: int):
    """exp(sign * i pi/4 (a^dag b + b^dag a)) on the block of total number ``ntot``.

    Basis index k labels |k, ntot - k>.
    """
    if ntot == 0:
        return np.ones((1, 1), dtype=np.complex128)
    k = np.arange(ntot, dtype=float)
    off = np.sqrt((k + 1) * (ntot - k))
    w, v = eigh_tridiagonal(np.zeros(ntot + 1), off)
    u = (v * np.exp(sign * 1j * math.pi / 4 * w)) @ v.T
    u.setflags(write=False)
    return u


def mz_outcome_distribution(state: TwoModeState, chi_q: float, chi_c_sym: float = 0.0,
                            chi_c_asym: float = 0.0) -> OutcomeDistribution:
    """Photon-counting distribution after beamsplitter, cavity phases, beamsplitter.

    Input beamsplitter exp(+i pi/4 J), output exp(-i pi/4 J), J = a^dag b + b^dag a;
    cavity phases exp(i[chi_q (K_a + K_b) + chi_c_sym (n_a + n_b) + chi_c_asym (n_a - n_b)]).
    Every step conserves total photon number, so it is carried out block by block.
    """
    psi = state.amplitudes
    d1, d2 = psi.shape
    nmax = d1 + d2 - 2
    probs = np.zeros((nmax + 1, nmax + 1))
    for ntot in range(nmax + 1):
        k_lo, k_hi = max(0, ntot - d2 + 1), min(ntot, d1 - 1)
        ks = np.arange(k_lo, k_hi + 1)
        amp_in = psi[ks, ntot - ks]
        if not np.any(amp_in):
            continue
        vec = np.zeros(ntot + 1, dtype=np.complex128)
        vec[ks] = amp_in
        k = np.arange(ntot + 1, dtype=float)
        m = ntot - k
        phase = chi_q * (k * (k - 1) + m * (m - 1)) + chi_c_sym * ntot + chi_c_asym * (k - m)
        kk = np.arange(ntot + 1)
        if np.all(phase == phase[0]):
            # a uniform phase commutes with the beamsplitters, which then cancel
            probs[kk, ntot - kk] = np.abs(vec) ** 2
            continue
        out = _bs_block(ntot, -1) @ (np.exp(1j * phase) * (_bs_block(ntot, +1) @ vec))
        probs[kk, ntot - kk] = np.abs(out) ** 2
    return OutcomeDistribution(probs, state.tail_bound)


def hellinger_distance_sq(dist_a: OutcomeDistribution, dist_b: OutcomeDistribution) -> float:
    """1 - sum sqrt(P Q), evaluated as 1/2 sum (sqrt P - sqrt Q)^2."""
    p = np.asarray(dist_a.probabilities)
    q = np.asarray(dist_b.probabilities)
    if p.shape != q.shape:
        raise ValueError(f"outcome tables differ in shape: {p.shape} vs {q.shape}")
    clamped = int(np.count_nonzero(p < 0) + np.count_nonzero(q < 0))
    if clamped:
        warnings.warn(f"clamped {clamped} negative probabilities to zero", RuntimeWarning, stacklevel=2)
    p = np.clip(p, 0.0, None)
    q = np.clip(q, 0.0, None)
    return 0.5 * math.fsum(((np.sqrt(p) - np.sqrt(q)) ** 2).ravel())


def hellinger_cfi(dist0: OutcomeDistribution, dist_chi: OutcomeDistribution, chi: float) -> float:
    """Classical Fisher information from d_H^2 = chi^2 F_C / 8 at a single step."""
    if chi <= 0:
        raise ValueError("chi must be positive")
    return 8.0 * hellinger_distance_sq(dist0, dist_chi) / chi**2


def extrapolated_mz_cfi(state: TwoModeState, chi: float = 1e-3, channel: str = "quantum",
                        convention: str = "half") -> float:
    """Hellinger CFI of the interferometer, Richardson-extrapolated over (chi, chi/2).

    ``channel`` picks which phase is scanned: ``"quantum"``, ``"classical-sym"``
    or ``"classical-asym"``.  For the quantum channel the result refers to the
    parameter conjugate to the composed generator of the chosen convention.
    """
    keys = {"quantum": "chi_q", "classical-sym": "chi_c_sym", "classical-asym": "chi_c_asym"}
    if channel not in keys:
        raise ValueError(f"unknown channel {channel!r}")
    # the interferometer itself is exp(i chi G_half); an unhalved generator
    # pairs with the parameter chi/2
    scale = CONVENTIONS[convention] / 0.5 if channel == "quantum" else 1.0
    base = mz_outcome_distribution(state, 0.0)

    def estimate(step):
        dist = mz_outcome_distribution(state, **{keys[channel]: step * scale})
        return hellinger_cfi(base, dist, step)

    return (4.0 * estimate(chi / 2) - estimate(chi)) / 3.0


def _require_pair_diagonal(state: TwoModeState):
    if not state.is_pair_diagonal():
        raise PreconditionError("input must be supported on |n, n> states only")


def analytic_mz_cfi(state: TwoModeState, convention: str = "half") -> float:
    """F_C = 4 <G_minus^2>, from the direct action of the pair-exchange generator."""
    _require_pair_diagonal(state)
    padded = state.padded(2)
    gm = mz_composed_generator(padded.dim, convention).minus
    v = gm.apply(padded.amplitudes)
    return 4.0 * float(np.vdot(v, v).real) / padded.norm_sq()


def mz_qfi(state: TwoModeState, convention: str = "half") -> float:
    """4 Var(G) of the composed generator."""
    padded = state.padded(2)
    g = mz_composed_generator(padded.dim, convention).total
    return float(qfim(padded, [g])[0, 0])


@dataclass
class RatioSweep:
    mean_photons: list[float]
    f_classical: list[float]
    f_quantum: list[float]
    ratios: list[float]
    ratio_limit: float
    coeff_classical: float
    coeff_quantum: float
    convention: str


def _extrapolate(x, y, degree=4):
    """Value at x -> infinity of a polynomial fit in 1/x."""
    return float(np.polyfit(1.0 / np.asarray(x, dtype=float), np.asarray(y, dtype=float), degree)[-1])


def mz_fisher_ratio_sweep(mean_photons=range(2, 13), convention: str = "half",
                          tol: float = DEFAULT_TOLERANCE) -> RatioSweep:
    """Brute-force F_Q / F_C of the interferometer over per-mode mean photon numbers.

    Leading coefficients are those of nbar^4 (per-mode mean photon number).
    """
    nbars, fc, fq = [], [], []
    for nbar in mean_photons:
        state = make_tmsv(math.asinh(math.sqrt(nbar)), dim=None, tol=tol)
        nbars.append(float(nbar))
        fc.append(analytic_mz_cfi(state, convention))
        fq.append(mz_qfi(state, convention))
    ratios = [q / c for q, c in zip(fq, fc)]
    n = np.asarray(nbars)
    return RatioSweep(
        mean_photons=nbars,
        f_classical=fc,
        f_quantum=fq,
        ratios=ratios,
        ratio_limit=_extrapolate(n, ratios),
        coeff_classical=_extrapolate(n, np.asarray(fc) / n**4),
        coeff_quantum=_extrapolate(n, np.asarray(fq) / n**4),
        convention=convention,
    )


# ---------------------------------------------------------------------------
# non-Gaussianity


def quadrature_cumulants(state: SingleModeState, theta: float, max_order: int = 4) -> list[float]:
    """Cumulants kappa_1..kappa_max_order of X_theta = (a e^{-i theta} + a^dag e^{i theta})/sqrt 2.

    The truncation error is of order sqrt(tail_bound); build states with
    ``tol=CUMULANT_TOLERANCE`` when kappa_3, kappa_4 must resolve 1e-9.
    """
    if not 1 <= max_order <= 4:
        raise ValueError("max_order must be between 1 and 4")
    padded = state.padded(4)
    norm = padded.norm_sq()
    x = quadrature(padded.dim, theta).entries
    psi = padded.amplitudes
    mean = np.vdot(psi, x @ psi).real / norm
    # central moments through Y = X - <X> avoid the raw-moment cancellation
    y1 = x @ psi - mean * psi
    y2 = x @ y1 - mean * y1
    m2 = np.vdot(y1, y1).real / norm
    m3 = np.vdot(y1, y2).real / norm
    m4 = np.vdot(y2, y2).real / norm
    cumulants = [mean, m2, m3, m4 - 3.0 * m2**2]
    return [float(c) for c in cumulants[:max_order]]


# ---------------------------------------------------------------------------
# scaling


@dataclass
class ScalingFit:
    exponent: float
    intercept: float
    r_squared: float
    N_range: list[float]


def scaling_exponent(N, y) -> ScalingFit:
    """Least-squares slope of log y against log N."""
    N = np.asarray(N, dtype=float)
    y = np.asarray(y, dtype=float)
    if N.size != y.size or N.size < 4:
        raise ValueError("scaling fit needs at least 4 (N, y) pairs")
    if np.any(y <= 0) or np.any(N <= 0):
        raise ValueError("scaling fit needs strictly positive N and y")
    fit = linregress(np.log(N), np.log(y))
    return ScalingFit(float(fit.slope), float(fit.intercept), float(min(1.0, fit.rvalue**2)), N.tolist())


def coherent_bounds(mean_photons, tol: float = DEFAULT_TOLERANCE):
    """(no-nuisance, with-nuisance) single-shot bounds for coherent states."""
    plain, nuisance = [], []
    for N in mean_photons:
        state = make_coherent(math.sqrt(N), tol=tol)
        F = qfim(state, single_mode_generators(state.dim))
        plain.append(single_parameter_qcrb(F))
        nuisance.append(nuisance_qcrb(F))
    return plain, nuisance


def sqvac_nuisance_bounds(mean_photons, tol: float = DEFAULT_TOLERANCE):
    out = []
    for N in mean_photons:
        state = make_squeezed_vacuum(math.asinh(math.sqrt(N)), tol=tol)
        out.append(nuisance_qcrb(qfim(state, single_mode_generators(state.dim))))
    return out


def thg_state(pump: SingleModeState, dim_harmonic: int = 2) -> TwoModeState:
    """Pump mode (padded for three-photon raising) times harmonic vacuum."""
    return product_state(pump.padded(3), make_vacuum(dim_harmonic))


def thg_qfi(pump: SingleModeState, dim_harmonic: int = 2) -> float:
    """4 Var(a^3 b^dag + a^dag^3 b) with the harmonic mode starting in vacuum."""
    state = thg_state(pump, dim_harmonic)
    g = thg_generator(*state.mode_dims)
    return float(qfim(state, [g])[0, 0])


def thg_harmonic_population(pump: SingleModeState, chi: float, dim_harmonic: int = 3) -> float:
    """Mean harmonic-mode photon number after exp(i chi G_THG), harmonic initially empty."""
    state = thg_state(pump, dim_harmonic)
    out = evolve_two_mode(state, thg_generator(*state.mode_dims), chi)
    probs = np.abs(out.amplitudes) ** 2
    return float(probs.sum(axis=0) @ np.arange(state.mode_dims[1]) / probs.sum())


def make_pump(kind: str, mean_photons: float, tol: float = DEFAULT_TOLERANCE) -> SingleModeState:
    if kind == "coherent":
        return make_coherent(math.sqrt(mean_photons), tol=tol)
    if kind in ("squeezed-vacuum", "sqvac"):
        return make_squeezed_vacuum(math.asinh(math.sqrt(mean_photons)), tol=tol)
    raise ValueError(f"unknown pump kind {kind!r}")
