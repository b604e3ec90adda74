"""Pure states of one and two optical modes in truncated Fock spaces.

Constructors pick the truncation automatically from the analytically known
photon-number distribution unless ``dim`` is given, in which case they check
that the discarded probability mass stays below ``tol``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import sparse
from scipy.special import gammaln

from .constants import DEFAULT_TOLERANCE
from .errors import DimensionMismatchError, InvalidDimensionError, TruncationError

# log-probability below which a term is treated as absent when summing tails
_LOG_NEGLIGIBLE = math.log(1e-40)
_DENSE_LIMIT = 64


@dataclass(frozen=True, eq=False)
class SingleModeState:
    amplitudes: np.ndarray
    tail_bound: float = 0.0

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 1 or amps.size < 1:
            raise InvalidDimensionError("single-mode amplitudes must be a non-empty vector")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def mode_dims(self) -> tuple[int, ...]:
        return (self.dim,)

    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def padded(self, extra: int) -> "SingleModeState":
        """Same state embedded in a space ``extra`` levels larger."""
        return SingleModeState(np.concatenate([self.amplitudes, np.zeros(extra)]), self.tail_bound)

    def with_amplitudes(self, amplitudes) -> "SingleModeState":
        return SingleModeState(amplitudes, self.tail_bound)


@dataclass(frozen=True, eq=False)
class TwoModeState:
    """Amplitudes indexed ``[n_a, n_b]``; the two modes may be truncated differently."""

    amplitudes: np.ndarray
    tail_bound: float = 0.0

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 2 or min(amps.shape) < 1:
            raise InvalidDimensionError("two-mode amplitudes must be a non-empty matrix")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def mode_dims(self) -> tuple[int, ...]:
        return self.amplitudes.shape

    def norm_sq(self) -> float:
        a = self.amplitudes.ravel()
        return float(np.vdot(a, a).real)

    def padded(self, extra_a: int, extra_b: int | None = None) -> "TwoModeState":
        if extra_b is None:
            extra_b = extra_a
        d1, d2 = self.amplitudes.shape
        out = np.zeros((d1 + extra_a, d2 + extra_b), dtype=np.complex128)
        out[:d1, :d2] = self.amplitudes
        return TwoModeState(out, self.tail_bound)

    def with_amplitudes(self, amplitudes) -> "TwoModeState":
        return TwoModeState(np.asarray(amplitudes).reshape(self.amplitudes.shape), self.tail_bound)

    def is_pair_diagonal(self) -> bool:
        a = self.amplitudes
        return bool(np.all(a[~np.eye(*a.shape, dtype=bool)] == 0))


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Operator on a truncated Fock space, stored sparse.

    ``structure`` is ``"diagonal"``, ``"banded(k)"`` or ``"dense"``.  Two-mode
    operators index the flattened amplitude matrix row-major and may carry a
    structural ``action`` on the amplitude array, used in place of the
    sparse product.
    """

    entries: sparse.csr_array
    structure: str = "dense"
    hermitian: bool = False
    mode_dims: tuple[int, ...] = ()
    label: str = ""
    action: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False)

    def __post_init__(self):
        entries = sparse.csr_array(self.entries, dtype=np.complex128)
        object.__setattr__(self, "entries", entries)
        if not self.mode_dims:
            object.__setattr__(self, "mode_dims", (entries.shape[0],))
        if int(np.prod(self.mode_dims)) != entries.shape[0]:
            raise DimensionMismatchError(f"mode dims {self.mode_dims} do not match {entries.shape}")

    @property
    def shape(self):
        return self.entries.shape

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        amplitudes = np.asarray(amplitudes, dtype=np.complex128)
        if amplitudes.shape != tuple(self.mode_dims):
            raise DimensionMismatchError(
                f"operator acts on {tuple(self.mode_dims)}, state has {amplitudes.shape}"
            )
        if self.action is not None:
            return self.action(amplitudes)
        return (self.entries @ amplitudes.ravel()).reshape(amplitudes.shape)

    def dense(self) -> np.ndarray:
        if max(self.mode_dims) > _DENSE_LIMIT and len(self.mode_dims) > 1:
            raise InvalidDimensionError("dense two-mode matrices are only built for dim <= 64")
        return self.entries.toarray()

    def diagonal(self) -> np.ndarray:
        return self.entries.diagonal()

    def hermiticity_residual(self) -> float:
        diff = self.entries - self.entries.conj().T
        return float(abs(diff).max()) if diff.nnz else 0.0

    def __add__(self, other):
        if tuple(self.mode_dims) != tuple(other.mode_dims):
            raise DimensionMismatchError("operator dims differ")
        return OperatorMatrix(
            self.entries + other.entries,
            structure=self.structure if self.structure == other.structure else "dense",
            hermitian=self.hermitian and other.hermitian,
            mode_dims=self.mode_dims,
            label=f"{self.label}+{other.label}",
        )

    def __sub__(self, other):
        return self + other.scaled(-1.0)

    def scaled(self, factor: float) -> "OperatorMatrix":
        action = None
        if self.action is not None:
            base = self.action
            action = lambda psi: factor * base(psi)  # noqa: E731
        return OperatorMatrix(
            self.entries * factor,
            structure=self.structure,
            hermitian=self.hermitian and np.isreal(factor),
            mode_dims=self.mode_dims,
            label=f"{factor:g}*{self.label}",
            action=action,
        )


# ---------------------------------------------------------------------------
# single-mode ladder operators


def _check_dim(dim):
    if not isinstance(dim, (int, np.integer)) or dim < 1:
        raise InvalidDimensionError(f"dimension must be a positive integer, got {dim!r}")
    return int(dim)


def annihilation(dim: int) -> OperatorMatrix:
    dim = _check_dim(dim)
    a = sparse.diags(np.sqrt(np.arange(1, dim, dtype=float)), 1, shape=(dim, dim))
    return OperatorMatrix(a, structure="banded(1)", hermitian=False, label="a")


def creation(dim: int) -> OperatorMatrix:
    dim = _check_dim(dim)
    ad = sparse.diags(np.sqrt(np.arange(1, dim, dtype=float)), -1, shape=(dim, dim))
    return OperatorMatrix(ad, structure="banded(1)", hermitian=False, label="adag")


def number_operator(dim: int) -> OperatorMatrix:
    dim = _check_dim(dim)
    n = np.arange(dim, dtype=float)
    return OperatorMatrix(sparse.diags(n), structure="diagonal", hermitian=True, label="n")


def quadrature(dim: int, theta: float) -> OperatorMatrix:
    """X_theta = (a e^{-i theta} + a^dag e^{i theta}) / sqrt(2)."""
    a = annihilation(dim).entries
    x = (a * np.exp(-1j * theta) + a.conj().T * np.exp(1j * theta)) / math.sqrt(2.0)
    return OperatorMatrix(x, structure="banded(1)", hermitian=True, label=f"X({theta:g})")


# ---------------------------------------------------------------------------
# truncation bookkeeping


def _suffix_tails(logp: np.ndarray) -> np.ndarray:
    """tails[k] = sum_{n >= k} p_n, accurate for tiny tails."""
    p = np.exp(logp)
    return np.cumsum(p[::-1])[::-1]


def _tail_and_dim(logp_fn, n_min: int, tol: float, dim: int | None, geometric_q: float | None = None):
    """Grow a log-pmf table until its terms are negligible, then read off tails.

    Returns ``(dim, tail)``.  ``logp_fn(n_array)`` gives log-probabilities of
    photon number ``n``.  ``geometric_q`` bounds the ratio of successive terms
    past the table end (adds a geometric remainder).
    """
    n_max = max(n_min, 64, (dim or 0) + 1)
    while True:
        n = np.arange(n_max + 1)
        logp = logp_fn(n)
        if np.max(logp[-2:]) < _LOG_NEGLIGIBLE and n_max > n_min:
            break
        n_max *= 2
    tails = _suffix_tails(logp)
    remainder = 0.0
    if geometric_q is not None and geometric_q < 1.0:
        remainder = math.exp(np.max(logp[-2:])) * geometric_q / (1.0 - geometric_q)
    tails = tails + remainder
    if dim is None:
        ok = np.nonzero(tails <= tol)[0]
        ok = ok[ok >= 1]
        dim = int(ok[0])
        return dim, float(tails[dim])
    tail = float(tails[dim]) if dim < tails.size else remainder
    if tail > tol:
        ok = np.nonzero(tails <= tol)[0]
        ok = ok[ok >= 1]
        raise TruncationError(
            f"dim={dim} discards probability {tail:.3e} > tolerance {tol:.1e}; "
            f"need dim >= {int(ok[0])}",
            required_dim=int(ok[0]),
            tail_bound=tail,
        )
    return dim, tail


# ---------------------------------------------------------------------------
# constructors


def make_vacuum(dim: int) -> SingleModeState:
    dim = _check_dim(dim)
    amps = np.zeros(dim, dtype=np.complex128)
    amps[0] = 1.0
    return SingleModeState(amps, 0.0)


def make_fock(n: int, dim: int) -> SingleModeState:
    dim = _check_dim(dim)
    if not 0 <= n < dim:
        raise InvalidDimensionError(f"Fock level {n} outside truncation {dim}")
    amps = np.zeros(dim, dtype=np.complex128)
    amps[n] = 1.0
    return SingleModeState(amps, 0.0)


def make_coherent(alpha: complex, dim: int | None = None, tol: float = DEFAULT_TOLERANCE) -> SingleModeState:
    """Coherent state with amplitudes e^{-|alpha|^2/2} alpha^n / sqrt(n!)."""
    if dim is not None:
        dim = _check_dim(dim)
    lam = abs(alpha) ** 2
    if lam == 0.0:
        return make_vacuum(dim or 1)

    def logp(n):
        return n * math.log(lam) - lam - gammaln(n + 1)

    dim, tail = _tail_and_dim(logp, int(lam + 10 * math.sqrt(lam) + 10), tol, dim)
    n = np.arange(dim)
    log_mod = 0.5 * logp(n)
    amps = np.exp(log_mod + 1j * n * np.angle(alpha))
    return SingleModeState(amps, tail)


def make_squeezed_vacuum(r: float, theta: float = 0.0, dim: int | None = None,
                         tol: float = DEFAULT_TOLERANCE) -> SingleModeState:
    """Squeezed vacuum from the even-n closed form.

    c_{2m} = (-e^{i theta} tanh r)^m sqrt((2m)!) / (2^m m! sqrt(cosh r)).
    """
    if r < 0:
        raise ValueError("squeeze magnitude r must be >= 0")
    if dim is not None:
        dim = _check_dim(dim)
    if r == 0.0:
        return make_vacuum(dim or 1)
    log_t = math.log(math.tanh(r))
    log_ch = math.log(math.cosh(r))

    def log_c(m):
        return m * log_t + 0.5 * gammaln(2 * m + 1) - m * math.log(2.0) - gammaln(m + 1) - 0.5 * log_ch

    def logp(n):
        # odd levels carry no probability; -inf keeps them out of the tail sums
        m = n // 2
        out = 2.0 * log_c(m)
        return np.where(n % 2 == 0, out, -np.inf)

    mean = math.sinh(r) ** 2
    q = math.tanh(r) ** 2
    dim, tail = _tail_and_dim(logp, int(4 * mean + 20), tol, dim, geometric_q=q)
    n = np.arange(dim)
    m = n // 2
    amps = np.where(n % 2 == 0, np.exp(log_c(m) + 1j * m * (theta + math.pi)), 0.0)
    return SingleModeState(amps, tail)


def make_tmsv(r: float, phi: float = 0.0, dim: int | None = None,
              tol: float = DEFAULT_TOLERANCE) -> TwoModeState:
    """Two-mode squeezed vacuum sum_N c_N |N,N>, c_N = (-e^{i phi} tanh r)^N / cosh r."""
    if r < 0:
        raise ValueError("squeeze magnitude r must be >= 0")
    if dim is not None:
        dim = _check_dim(dim)
    if r == 0.0:
        dim = dim or 1
        amps = np.zeros((dim, dim), dtype=np.complex128)
        amps[0, 0] = 1.0
        return TwoModeState(amps, 0.0)
    t = math.tanh(r)
    q = t * t
    # P(N >= k) = q^k exactly for the geometric distribution
    required = 1 if q <= tol else math.ceil(math.log(tol) / math.log(q))
    if dim is None:
        dim = required
    elif q**dim > tol:
        raise TruncationError(
            f"dim={dim} discards probability {q**dim:.3e} > tolerance {tol:.1e}; need dim >= {required}",
            required_dim=required,
            tail_bound=q**dim,
        )
    N = np.arange(dim)
    c = np.exp(N * math.log(t) - math.log(math.cosh(r)) + 1j * N * (phi + math.pi))
    amps = np.zeros((dim, dim), dtype=np.complex128)
    amps[N, N] = c
    return TwoModeState(amps, q**dim)


def product_state(first: SingleModeState, second: SingleModeState) -> TwoModeState:
    amps = np.outer(first.amplitudes, second.amplitudes)
    a, b = first.tail_bound, second.tail_bound
    tail = a + b - a * b
    return TwoModeState(amps, tail)


# ---------------------------------------------------------------------------
# measurement-level helpers


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    """Photon-counting probabilities, 1-D ``P[n]`` or 2-D ``P[n1, n2]``."""

    probabilities: np.ndarray
    tail_bound: float = 0.0

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        p.setflags(write=False)
        object.__setattr__(self, "probabilities", p)

    @property
    def shape(self):
        return self.probabilities.shape

    def total(self) -> float:
        return math.fsum(self.probabilities.ravel())

    def __getitem__(self, index):
        p = self.probabilities
        if isinstance(index, tuple):
            if all(0 <= k < s for k, s in zip(index, p.shape)):
                return float(p[index])
            return 0.0
        return float(p[index]) if 0 <= index < p.shape[0] else 0.0

    def by_difference(self) -> dict[int, float]:
        """Total probability for each n1 - n2 (two-mode only)."""
        p = self.probabilities
        i, j = np.indices(p.shape)
        diff = (i - j).ravel()
        out = {}
        for d in np.unique(diff):
            out[int(d)] = float(p.ravel()[diff == d].sum())
        return out


def number_distribution(state) -> OutcomeDistribution:
    return OutcomeDistribution(np.abs(state.amplitudes) ** 2, state.tail_bound)


def expectation(state, op: OperatorMatrix) -> complex:
    if tuple(state.mode_dims) != tuple(op.mode_dims):
        raise DimensionMismatchError(f"state dims {state.mode_dims} vs operator dims {op.mode_dims}")
    psi = state.amplitudes
    value = np.vdot(psi.ravel(), op.apply(psi).ravel())
    if op.hermitian:
        return complex(value.real, 0.0)
    return complex(value)


def photon_moments(state: SingleModeState, orders=(1, 2)) -> tuple[float, ...]:
    p = np.abs(state.amplitudes) ** 2
    n = np.arange(state.dim, dtype=float)
    return tuple(float(np.dot(p, n**k)) for k in orders)


# ---------------------------------------------------------------------------
# debug serialization


def state_to_csv(state) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    amps = state.amplitudes
    if amps.ndim == 1:
        writer.writerow(["n", "re", "im"])
        for n, c in enumerate(amps):
            writer.writerow([n, repr(float(c.real)), repr(float(c.imag))])
    else:
        writer.writerow(["n1", "n2", "re", "im"])
        for (n1, n2), c in np.ndenumerate(amps):
            writer.writerow([n1, n2, repr(float(c.real)), repr(float(c.imag))])
    return buf.getvalue()


def state_from_csv(text: str, tail_bound: float = 0.0):
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    if header == ["n", "re", "im"]:
        dim = max(int(r[0]) for r in body) + 1
        amps = np.zeros(dim, dtype=np.complex128)
        for n, re, im in body:
            amps[int(n)] = complex(float(re), float(im))
        return SingleModeState(amps, tail_bound)
    if header == ["n1", "n2", "re", "im"]:
        d1 = max(int(r[0]) for r in body) + 1
        d2 = max(int(r[1]) for r in body) + 1
        amps = np.zeros((d1, d2), dtype=np.complex128)
        for n1, n2, re, im in body:
            amps[int(n1), int(n2)] = complex(float(re), float(im))
        return TwoModeState(amps, tail_bound)
    raise ValueError(f"unrecognised state CSV header {header}")
