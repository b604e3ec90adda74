"""Gravitational self-interaction strength of a rectangular ring cavity.

Only the two long arms (length L, separation w) interact; the transverse
profile is a line.  The arm-arm overlap integral

    I(L, w) = int_0^L int_0^L dz dz' / sqrt((z - z')^2 + w^2)

has a closed form, an L >> w asymptote 2 L log(L/w), and an adaptive
quadrature used as an independent check.
"""
from __future__ import annotations

import heapq
import math
import warnings
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .constants import C, G, HBAR
from .errors import AccuracyError, UnsupportedConfigurationError


@dataclass(frozen=True)
class CavityGeometry:
    arm_length: float
    separation: float
    finesse: float
    wavelength: float
    beam_width: float | None = None

    def __post_init__(self):
        if not self.separation > 0:
            raise ValueError("arm separation must be positive")
        if not self.arm_length > self.separation:
            raise ValueError("arm length must exceed the arm separation")
        if self.finesse < 1:
            raise ValueError("finesse must be >= 1")
        if not 0 < self.wavelength < self.separation:
            raise ValueError("wavelength must be positive and smaller than the arm separation")
        if self.separation / self.wavelength < 100:
            warnings.warn("arm separation is not much larger than the wavelength; diffraction neglected",
                          RuntimeWarning, stacklevel=2)

    @property
    def omega0(self) -> float:
        return 2 * math.pi * C / self.wavelength

    @property
    def interrogation_time(self) -> float:
        return 2 * self.finesse * self.arm_length / C

    def replace(self, **changes) -> "CavityGeometry":
        fields = dict(arm_length=self.arm_length, separation=self.separation, finesse=self.finesse,
                      wavelength=self.wavelength, beam_width=self.beam_width)
        fields.update(changes)
        return CavityGeometry(**fields)


class MediatorSpin(IntEnum):
    SCALAR = 0
    TENSOR = 2


# ---------------------------------------------------------------------------
# overlap integral


def geometric_factor_exact(L: float, w: float) -> float:
    """Closed form 2(w - sqrt(L^2 + w^2)) + L log((sqrt(L^2+w^2) + L)/(sqrt(L^2+w^2) - L)).

    The logarithm equals 2 asinh(L/w), which avoids the cancellation in the
    denominator when L >> w.
    """
    if L <= 0 or w <= 0:
        raise ValueError("L and w must be positive")
    return 2.0 * (w - math.hypot(L, w)) + 2.0 * L * math.asinh(L / w)


def geometric_factor_asymptotic(L: float, w: float) -> float:
    """2 L log(L/w); about 4.6% high at L/w = 1e3, 2.7% at 1e5."""
    if not L > w > 0:
        raise ValueError("asymptotic form needs L > w > 0")
    return 2.0 * L * math.log(L / w)


_GL_X, _GL_W = np.polynomial.legendre.leggauss(10)


def _inner(z, L, w):
    # int_0^L dz' / sqrt((z - z')^2 + w^2)
    return np.arcsinh((L - z) / w) + np.arcsinh(z / w)


def _panel(a, b, L, w):
    half = 0.5 * (b - a)
    z = a + half * (_GL_X + 1.0)
    return half * float(np.dot(_GL_W, _inner(z, L, w)))


def geometric_factor_quadrature(L: float, w: float, panels: int = 512, rtol: float = 1e-13) -> float:
    """Adaptive Gauss-Legendre panels on the outer integral, analytic inner integral.

    ``panels`` caps the number of panels; running out raises
    :class:`AccuracyError` carrying the current estimate.
    """
    if panels < 64:
        raise ValueError("panel budget must be at least 64")
    if L <= 0 or w <= 0:
        raise ValueError("L and w must be positive")

    def split(a, b):
        whole = _panel(a, b, L, w)
        m = 0.5 * (a + b)
        left, right = _panel(a, m, L, w), _panel(m, b, L, w)
        return (-abs(whole - left - right), a, b, left + right)

    heap = []
    edges = np.linspace(0.0, L, 5)
    for a, b in zip(edges[:-1], edges[1:]):
        heapq.heappush(heap, split(a, b))
    while True:
        total = math.fsum(item[3] for item in heap)
        err = -math.fsum(item[0] for item in heap)
        if err <= rtol * abs(total):
            return total
        if len(heap) + 1 > panels:
            raise AccuracyError(f"quadrature did not reach rtol={rtol:g} within {panels} panels",
                                estimate=total, error=err)
        _, a, b, _ = heapq.heappop(heap)
        m = 0.5 * (a + b)
        heapq.heappush(heap, split(a, m))
        heapq.heappush(heap, split(m, b))


# ---------------------------------------------------------------------------
# coupling constants


def chi_q(geometry: CavityGeometry, mediator: int = MediatorSpin.TENSOR) -> float:
    """Kerr phase per interrogation, 32 G F hbar w0^2 log(L/w) / c^5."""
    value = 32 * G * geometry.finesse * HBAR * geometry.omega0**2 / C**5 * math.log(
        geometry.arm_length / geometry.separation)
    return value * mediator_coupling(mediator)


def interaction_hamiltonian_coefficient(geometry: CavityGeometry, mode: str = "asymptotic") -> float:
    """Prefactor (J) of a^dag a^dag a a in the self-interaction Hamiltonian.

    ``"asymptotic"``: -(16 G / L)(hbar w0 / c^2)^2 log(L/w).
    ``"exact"``: -32 G rho0^2 I(L, w) with rho0 = (hbar w0 / c^2) / (2 (L + w)),
    keeping the full overlap integral and the (L + w) mode normalisation.
    """
    L, w = geometry.arm_length, geometry.separation
    mass = HBAR * geometry.omega0 / C**2
    if mode == "asymptotic":
        return -16 * G / L * mass**2 * math.log(L / w)
    if mode == "exact":
        rho0 = mass / (2 * (L + w))
        return -32 * G * rho0**2 * geometric_factor_exact(L, w)
    raise ValueError(f"unknown mode {mode!r}")


def mediator_coupling(spin: int) -> float:
    """Spin-2 couples to the full stress-energy; spin-0 only to its trace, zero for light."""
    try:
        spin = MediatorSpin(int(spin))
    except ValueError:
        raise ValueError(f"unsupported mediator spin {spin!r}; expected 0 or 2") from None
    return 1.0 if spin is MediatorSpin.TENSOR else 0.0


def co_propagating_interaction() -> float:
    """A freely co-propagating beam has no gravitational self-interaction."""
    return 0.0


def configuration_interaction(geometry: CavityGeometry, configuration: str = "counter-propagating",
                              mode: str = "asymptotic") -> float:
    if configuration == "counter-propagating":
        return interaction_hamiltonian_coefficient(geometry, mode)
    if configuration == "co-propagating":
        return co_propagating_interaction()
    if configuration == "standing-wave":
        raise UnsupportedConfigurationError("standing-wave cavities are not modelled")
    raise UnsupportedConfigurationError(f"unknown configuration {configuration!r}")
