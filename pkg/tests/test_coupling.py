import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gravkerr.constants import C, HBAR
from gravkerr.coupling import (
    CavityGeometry,
    MediatorSpin,
    chi_q,
    co_propagating_interaction,
    configuration_interaction,
    geometric_factor_asymptotic,
    geometric_factor_exact,
    geometric_factor_quadrature,
    interaction_hamiltonian_coefficient,
    mediator_coupling,
)
from gravkerr.errors import AccuracyError, UnsupportedConfigurationError

CE = CavityGeometry(1e4, 0.1, 450, 2e-6)
LOG_GRID = np.logspace(0, 6, 7)


def test_exact_values():
    r2 = math.sqrt(2)
    assert abs(geometric_factor_exact(1, 1) - (2 * (1 - r2) + math.log((r2 + 1) / (r2 - 1)))) < 1e-15
    assert abs(geometric_factor_exact(1, 1) - 0.93432) < 1e-5
    assert abs(geometric_factor_exact(1000, 1) - 13203.8) < 0.05
    # far field: L^2 / w
    assert abs(geometric_factor_exact(1, 1e3) * 1e3 - 1) < 0.01


def test_exact_rejects_nonpositive():
    with pytest.raises(ValueError):
        geometric_factor_exact(0.0, 1.0)


@pytest.mark.parametrize("L,w", [(1.0, 1.0), (10.0, 0.1)])
def test_quadrature_matches_exact(L, w):
    assert abs(geometric_factor_quadrature(L, w, panels=512) / geometric_factor_exact(L, w) - 1) <= 1e-10


@pytest.mark.parametrize("ratio", LOG_GRID)
def test_quadrature_log_grid(ratio):
    assert abs(geometric_factor_quadrature(ratio, 1.0) / geometric_factor_exact(ratio, 1.0) - 1) <= 1e-10


def test_quadrature_budget():
    with pytest.raises(ValueError):
        geometric_factor_quadrature(1.0, 1.0, panels=32)
    with pytest.raises(AccuracyError) as info:
        geometric_factor_quadrature(1e6, 1e-3, panels=64, rtol=1e-18)
    assert info.value.estimate > 0


def test_kernel_symmetry():
    # brute-force 2-D Gauss-Legendre in both orders of integration
    x, wts = np.polynomial.legendre.leggauss(200)
    L, w = 2.0, 0.7
    z = 0.5 * L * (x + 1)
    zz, zp = np.meshgrid(z, z, indexing="ij")
    k = 1 / np.sqrt((zz - zp) ** 2 + w**2)
    weights = np.outer(wts, wts) * (0.5 * L) ** 2
    assert abs((weights * k).sum() - (weights * k.T).sum()) < 1e-13
    assert abs((weights * k).sum() / geometric_factor_exact(L, w) - 1) < 1e-8


def test_asymptotic_accuracy():
    assert abs(geometric_factor_asymptotic(1000, 1) - 2000 * math.log(1000)) < 1e-9
    err = lambda r: geometric_factor_asymptotic(r, 1) / geometric_factor_exact(r, 1) - 1  # noqa: E731
    assert abs(err(1e3) - 0.0463) < 5e-4
    assert abs(err(1e5) - 0.0274) < 5e-4
    assert err(10) > 0.10
    for r in LOG_GRID[LOG_GRID >= 1e3]:
        assert 0 < err(r) <= 0.05
    with pytest.raises(ValueError):
        geometric_factor_asymptotic(1.0, 2.0)


@given(st.floats(1.5, 1e5), st.floats(0.01, 10.0))
def test_exact_monotone(L, w):
    assert geometric_factor_exact(L * 1.01, w) > geometric_factor_exact(L, w)
    assert geometric_factor_exact(L, w * 1.01) < geometric_factor_exact(L, w)


def test_geometry_validation():
    with pytest.raises(ValueError):
        CavityGeometry(1.0, 2.0, 10, 1e-6)
    with pytest.raises(ValueError):
        CavityGeometry(10.0, 0.0, 10, 1e-6)
    with pytest.raises(ValueError):
        CavityGeometry(10.0, 1.0, 0.5, 1e-6)
    with pytest.raises(ValueError):
        CavityGeometry(10.0, 1e-6, 10, 2e-6)
    with pytest.warns(RuntimeWarning):
        CavityGeometry(10.0, 1e-4, 10, 2e-6)
    assert abs(CE.omega0 - 2 * math.pi * C / 2e-6) < 1e-3


def test_chi_q_ce_like():
    assert abs(chi_q(CE) / 4.28e-52 - 1) < 5e-3
    assert abs(chi_q(CE.replace(finesse=1e3)) / 9.5e-52 - 1) < 5e-3
    assert abs(chi_q(CE.replace(finesse=1e3)) / chi_q(CE) - 1e3 / 450) < 1e-12
    assert abs(chi_q(CE.replace(wavelength=1e-6)) / chi_q(CE) - 4) < 1e-12


def test_chi_q_rescaling_regression():
    # (L, w, F) -> (kL, kw, F/k) keeps log(L/w) and scales chi_q by 1/k
    k = 3.0
    scaled = CavityGeometry(CE.arm_length * k, CE.separation * k, CE.finesse / k, CE.wavelength)
    assert abs(chi_q(scaled) * k / chi_q(CE) - 1) < 1e-12


def test_hamiltonian_coefficient_consistency():
    coeff = interaction_hamiltonian_coefficient(CE)
    assert coeff < 0
    tau = 2 * CE.finesse * CE.arm_length / C
    assert abs(abs(coeff) * tau / HBAR / chi_q(CE) - 1) < 1e-12


def test_exact_mode_shift():
    ratio = interaction_hamiltonian_coefficient(CE, "exact") / interaction_hamiltonian_coefficient(CE)
    # exact overlap and (L/(L+w))^2 normalisation lower the CE-like coefficient by about 2.7%
    assert abs(ratio - 0.97333) < 1e-4
    with pytest.raises(ValueError):
        interaction_hamiltonian_coefficient(CE, "retarded")


def test_coefficient_vanishes_as_w_to_l():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        g = CavityGeometry(1.0, 1.0 - 1e-12, 10, 1e-6)
    assert abs(interaction_hamiltonian_coefficient(g)) < 1e-40


def test_mediator_selection():
    assert mediator_coupling(2) == 1.0
    assert mediator_coupling(MediatorSpin.SCALAR) == 0.0
    assert chi_q(CE, 0) == 0.0
    with pytest.raises(ValueError):
        mediator_coupling(1)


def test_configurations():
    assert co_propagating_interaction() == 0.0
    assert configuration_interaction(CE, "co-propagating") == 0.0
    assert configuration_interaction(CE, "counter-propagating") != 0.0
    with pytest.raises(UnsupportedConfigurationError):
        configuration_interaction(CE, "standing-wave")
