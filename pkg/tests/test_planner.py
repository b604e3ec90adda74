import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gravkerr.constants import C, JULIAN_YEAR
from gravkerr.coupling import CavityGeometry
from gravkerr.errors import IncompleteScenarioError
from gravkerr.planner import (
    Scenario,
    circulating_power,
    circulating_power_bound,
    feasibility_check,
    interrogation_time,
    marginal_photon_number,
    photon_number,
    shots,
    sqvac_bound,
)

CE = CavityGeometry(1e4, 0.1, 450, 2e-6, beam_width=0.02)


def test_interrogation_time():
    assert abs(interrogation_time(CE) - 0.030) < 1e-4
    assert abs(interrogation_time(CE.replace(finesse=1e3)) - 0.0667) < 1e-4
    unit = CavityGeometry(C / 2, 1.0, 1, 1e-6)
    assert abs(interrogation_time(unit) - 1.0) < 1e-15


def test_shots():
    assert abs(shots(JULIAN_YEAR, CE) / 1.05e9 - 1) < 0.01
    assert abs(shots(interrogation_time(CE), CE) - 1) < 1e-15
    assert shots(2 * JULIAN_YEAR, CE) == 2 * shots(JULIAN_YEAR, CE)
    with pytest.warns(RuntimeWarning):
        assert shots(0.001, CE) < 1


def test_photon_number():
    assert abs(photon_number(1.25e8, CE) / 8.4e22 - 1) < 0.01
    assert photon_number(2.5e8, CE) == pytest.approx(2 * photon_number(1.25e8, CE), rel=1e-15)
    with pytest.raises(ValueError):
        photon_number(0.0, CE)


@given(st.floats(1e-3, 1e12))
def test_photon_number_round_trip(p):
    assert abs(circulating_power(photon_number(p, CE), CE) / p - 1) < 1e-12


def test_power_bound_ce():
    assert abs(circulating_power_bound(CE, JULIAN_YEAR) / 1.28e8 - 1) < 0.01
    p1000 = circulating_power_bound(CE.replace(finesse=1e3), JULIAN_YEAR)
    assert abs(p1000 / 1.05e8 - 1) < 0.01
    assert abs(p1000 / 1e3 / 105e3 - 1) < 0.01


def test_power_bound_scaling_laws():
    base = circulating_power_bound(CE, JULIAN_YEAR)
    assert abs(circulating_power_bound(CE, 16 * JULIAN_YEAR) / base - 0.5) < 1e-10
    assert abs(circulating_power_bound(CE.replace(finesse=450 * 16), JULIAN_YEAR) / base - 0.5) < 1e-10
    # L^{-3/4} at fixed log(L/w): scale w with L
    longer = CE.replace(arm_length=16 * CE.arm_length, separation=16 * CE.separation)
    assert abs(circulating_power_bound(longer, JULIAN_YEAR) / base - 16**-0.75) < 1e-10


@given(st.floats(5e-7, 5e-4))
def test_power_bound_wavelength_free(lam):
    other = CavityGeometry(CE.arm_length, CE.separation, CE.finesse, lam)
    ratio = circulating_power_bound(other, JULIAN_YEAR) / circulating_power_bound(CE, JULIAN_YEAR)
    assert abs(ratio - 1) <= 1e-12


def test_marginal_photon_number_solves_quadratic():
    chi, m = 3e-40, 1e8
    n = marginal_photon_number(chi, m)
    assert abs(sqvac_bound(n, m) / chi - 1) < 1e-12
    assert marginal_photon_number(0.0, m) == math.inf


def test_feasibility_marginal_at_bound():
    p = circulating_power_bound(CE, JULIAN_YEAR)
    report = feasibility_check(Scenario(CE, JULIAN_YEAR, circulating_power=p))
    assert report.status == "marginal"
    assert abs(report.closure) < 0.03
    assert abs(report.chi_q / 4.3e-52 - 1) < 0.01


def test_feasibility_ten_times_power():
    p = circulating_power_bound(CE, JULIAN_YEAR)
    report = feasibility_check(Scenario(CE, JULIAN_YEAR, circulating_power=10 * p))
    assert report.status == "pass"
    # bound ~ 1/N^2 ~ P^-2
    assert abs(report.margin / 100 - 1) < 1e-6


def test_feasibility_low_power_and_spin0():
    p = circulating_power_bound(CE, JULIAN_YEAR)
    assert feasibility_check(Scenario(CE, JULIAN_YEAR, circulating_power=p / 2)).status == "fail"
    report = feasibility_check(Scenario(CE, JULIAN_YEAR, circulating_power=100 * p, mediator_spin=0))
    assert report.chi_q == 0 and report.status == "fail" and not report.feasible


def test_scenario_power_conventions():
    s = Scenario(CE.replace(finesse=1e3), JULIAN_YEAR, pump_power=105e3)
    assert s.circulating == 1.05e8
    report = feasibility_check(s)
    # circulating intensity scale, W/cm^2
    assert abs(report.intensity / 1e4 / 25e6 - 1) < 0.1
    with pytest.raises(ValueError):
        Scenario(CE, JULIAN_YEAR, pump_power=1.0, circulating_power=1.0)
    with pytest.raises(ValueError):
        Scenario(CE, 0.0, pump_power=1.0)
    with pytest.raises(IncompleteScenarioError):
        feasibility_check(Scenario(CE, JULIAN_YEAR))


@given(st.floats(1e3, 1e5), st.floats(0.01, 1.0), st.floats(10, 1e4), st.floats(1e5, 1e9))
def test_closure_property(L, w, finesse, T):
    g = CavityGeometry(L, w, finesse, 1e-6)
    p = circulating_power_bound(g, T)
    report = feasibility_check(Scenario(g, T, circulating_power=p))
    assert abs(report.closure) < 0.03
