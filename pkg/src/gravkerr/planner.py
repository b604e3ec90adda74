"""Experimental budgets: interrogation time, shots, photon number, required power.

Conventions: circulating power = finesse x pump power; a year is the Julian
year.  The squeezed-vacuum nuisance bound used here is
1 / (sqrt(96 M) N (N + 1)).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .constants import C, G, HBAR
from .coupling import CavityGeometry, chi_q
from .errors import IncompleteScenarioError


def interrogation_time(geometry: CavityGeometry) -> float:
    return 2 * geometry.finesse * geometry.arm_length / C


def shots(total_time: float, geometry: CavityGeometry) -> float:
    tau = interrogation_time(geometry)
    if total_time < tau:
        warnings.warn("total time shorter than one interrogation; fewer than one shot", RuntimeWarning,
                      stacklevel=2)
    return total_time / tau


def photon_number(circulating_power: float, geometry: CavityGeometry) -> float:
    """Invert P_circ = N hbar w0 c / (2 L)."""
    if circulating_power <= 0:
        raise ValueError("power must be positive")
    return 2 * geometry.arm_length * circulating_power / (HBAR * geometry.omega0 * C)


def circulating_power(photons: float, geometry: CavityGeometry) -> float:
    return photons * HBAR * geometry.omega0 * C / (2 * geometry.arm_length)


def circulating_power_bound(geometry: CavityGeometry, total_time: float) -> float:
    """(c^3/16) (c hbar^2 / (12 G^2 F L^3 T log(L/w)^2))^(1/4); independent of wavelength."""
    L = geometry.arm_length
    log = math.log(L / geometry.separation)
    inner = C * HBAR**2 / (12 * G**2 * geometry.finesse * L**3 * total_time * log**2)
    return C**3 / 16 * inner**0.25


def sqvac_bound(photons: float, n_shots: float) -> float:
    return 1.0 / (math.sqrt(96 * n_shots) * photons * (photons + 1))


def marginal_photon_number(chi: float, n_shots: float) -> float:
    """N solving chi = 1 / (sqrt(96 M) N (N + 1))."""
    if chi <= 0:
        return math.inf
    k = 1.0 / (chi * math.sqrt(96 * n_shots))
    return 2 * k / (1 + math.sqrt(1 + 4 * k))


@dataclass(frozen=True)
class Scenario:
    geometry: CavityGeometry
    total_time: float
    pump_power: float | None = None
    circulating_power: float | None = None
    label: str = ""
    mediator_spin: int = 2

    def __post_init__(self):
        if not self.total_time > 0:
            raise ValueError("total time must be positive")
        if self.pump_power is not None and self.circulating_power is not None:
            raise ValueError("give either pump power or circulating power, not both")

    @property
    def circulating(self) -> float:
        if self.circulating_power is not None:
            return self.circulating_power
        if self.pump_power is not None:
            return self.geometry.finesse * self.pump_power
        raise IncompleteScenarioError(f"scenario {self.label!r} specifies no power")


@dataclass(frozen=True)
class FeasibilityReport:
    label: str
    circulating_power: float
    pump_power: float
    photon_number: float
    shots: float
    chi_q: float
    required_chi_q: float
    margin: float
    marginal_power: float
    power_bound: float
    closure: float
    status: str
    intensity: float | None = None

    @property
    def feasible(self) -> bool:
        return self.status != "fail"

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def feasibility_check(scenario: Scenario, marginal_band: float = 0.05) -> FeasibilityReport:
    """Compare the achieved Kerr phase with the nuisance bound for the scenario.

    ``status`` is ``"marginal"`` when chi_q / bound is within ``marginal_band``
    of 1, ``"pass"`` above that and ``"fail"`` below.  ``closure`` is the
    relative gap between the power at which chi_q meets the bound and the
    closed-form power requirement.
    """
    geometry = scenario.geometry
    power = scenario.circulating
    chi = chi_q(geometry, scenario.mediator_spin)
    n = photon_number(power, geometry)
    m = shots(scenario.total_time, geometry)
    bound = sqvac_bound(n, m)
    margin = chi / bound
    n_star = marginal_photon_number(chi, m)
    p_star = circulating_power(n_star, geometry) if math.isfinite(n_star) else math.inf
    p_bound = circulating_power_bound(geometry, scenario.total_time)
    if abs(margin - 1) <= marginal_band:
        status = "marginal"
    elif margin > 1:
        status = "pass"
    else:
        status = "fail"
    intensity = None
    if geometry.beam_width:
        intensity = power / geometry.beam_width**2
    return FeasibilityReport(
        label=scenario.label,
        circulating_power=power,
        pump_power=power / geometry.finesse,
        photon_number=n,
        shots=m,
        chi_q=chi,
        required_chi_q=bound,
        margin=margin,
        marginal_power=p_star,
        power_bound=p_bound,
        closure=p_star / p_bound - 1 if math.isfinite(p_star) else math.inf,
        status=status,
        intensity=intensity,
    )
