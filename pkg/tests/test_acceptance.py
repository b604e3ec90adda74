"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v`` (or ``python3 tests/test_acceptance.py``);
the verdict lines are repeated in an "acceptance criteria" section at the end.
"""
import json
import math
import sys

import numpy as np

from gravkerr.cli import EXIT_OK, main
from gravkerr.config import preset_names
from gravkerr.constants import JULIAN_YEAR
from gravkerr.coupling import (
    CavityGeometry,
    chi_q,
    co_propagating_interaction,
    configuration_interaction,
    geometric_factor_asymptotic,
    geometric_factor_exact,
    geometric_factor_quadrature,
    mediator_coupling,
)
from gravkerr.fock import annihilation, make_coherent, make_squeezed_vacuum, make_tmsv, make_vacuum
from gravkerr.generators import beamsplitter_conjugation_check, evolve_kerr, single_mode_generators
from gravkerr.metrology import (
    CUMULANT_TOLERANCE,
    analytic_mz_cfi,
    analytic_sqvac_qfim,
    coherent_bounds,
    extrapolated_mz_cfi,
    make_pump,
    mz_fisher_ratio_sweep,
    mz_outcome_distribution,
    mz_qfi,
    qfim,
    quadrature_cumulants,
    scaling_exponent,
    sqvac_nuisance_bounds,
    thg_qfi,
)
from gravkerr.planner import circulating_power_bound

CE = CavityGeometry(1e4, 0.1, 450, 2e-6, beam_width=0.02)


def _rel(a, b):
    return abs(a / b - 1)


def _cli(tmp_path, command, preset, *extra):
    out = tmp_path / f"{command}-{preset}"
    code = main([command, "--preset", preset, "--out", str(out), "--quiet", *extra])
    return code, out


def _report(out, command):
    return json.loads((out / f"{command}_report.json").read_text())


def test_criterion_01_sqvac_qfim(verdict):
    worst = 0.0
    max_dim = 0
    for r in (0.25, 0.5, 0.75, 1.0, 1.25):
        s = make_squeezed_vacuum(r)
        max_dim = max(max_dim, s.dim)
        N = math.sinh(r) ** 2
        F = qfim(s, single_mode_generators(s.dim))
        F_an, _ = analytic_sqvac_qfim(N)
        for i, j in ((0, 0), (0, 1), (1, 1)):
            worst = max(worst, _rel(F[i, j], F_an[i, j]))
        worst = max(worst, _rel(np.linalg.inv(F)[0, 0], 1 / (96 * N**2 * (N + 1) ** 2)))
    ok = worst <= 1e-6 and max_dim <= 200
    verdict(1, "squeezed-vacuum QFIM and inverse vs closed form", ok,
            f"max rel err {worst:.2e} <= 1e-6, max dim {max_dim}")
    assert ok


def test_criterion_02_power_bound(tmp_path, verdict):
    code, out = _cli(tmp_path, "power", "ce-450")
    rep = _report(out, "power")
    p = rep["circulating_power_bound_W"]
    code_f, out_f = _cli(tmp_path, "power", "ce-1000")
    pump = _report(out_f, "power")["pump_power_bound_W"]
    base = circulating_power_bound(CE, JULIAN_YEAR)
    ratios = [
        _rel(circulating_power_bound(CE, 16 * JULIAN_YEAR) / base, 0.5),
        _rel(circulating_power_bound(CE.replace(finesse=16 * CE.finesse), JULIAN_YEAR) / base, 0.5),
        _rel(circulating_power_bound(CE.replace(arm_length=16 * CE.arm_length, separation=16 * CE.separation),
                                     JULIAN_YEAR) / base, 16**-0.75),
    ]
    ok = (code == code_f == EXIT_OK and _rel(p, 1.28e8) <= 0.01 and _rel(p, 125e6) <= 0.10
          and _rel(pump, 100e3) <= 0.15 and max(ratios) <= 1e-10)
    verdict(2, "circulating power bound, pump at finesse 1000, scaling ratios", ok,
            f"P={p:.4g} W ({p / 125e6 - 1:+.2%} vs 125 MW), pump={pump:.4g} W ({pump / 100e3 - 1:+.2%} vs 100 kW),"
            f" ratio err {max(ratios):.1e}")
    assert ok


def test_criterion_03_closure(tmp_path, verdict):
    _, out = _cli(tmp_path, "power", "ce-450")
    rep = _report(out, "power")
    diff = rep["closure"]["relative_difference"]
    ok = abs(diff) <= 0.03
    verdict(3, "marginal power from chi_Q = nuisance bound vs closed-form bound", ok, f"rel diff {diff:.2e}")
    assert ok


def test_criterion_04_overlap_oracle(verdict):
    grid = np.logspace(0, 6, 7)
    quad = max(_rel(geometric_factor_quadrature(x, 1.0), geometric_factor_exact(x, 1.0)) for x in grid)
    asym = max(_rel(geometric_factor_asymptotic(x, 1.0), geometric_factor_exact(x, 1.0)) for x in grid if x >= 1e3)
    ok = quad <= 1e-10 and asym <= 0.05
    verdict(4, "overlap integral: quadrature vs closed form, asymptotic accuracy", ok,
            f"quadrature {quad:.1e} <= 1e-10, asymptotic {asym:.2%} <= 5%")
    assert ok


def test_criterion_05_interferometer_fisher(verdict):
    errs, cfi_ok, dims = [], True, []
    for r in (0.4, 0.8):
        s = make_tmsv(r)
        dims.append(s.dim)
        hel, an, fq = extrapolated_mz_cfi(s), analytic_mz_cfi(s), mz_qfi(s)
        errs.append(_rel(hel, an))
        cfi_ok &= hel <= fq and an <= fq
    residual = beamsplitter_conjugation_check(16)
    sweep = mz_fisher_ratio_sweep(range(2, 13))
    ok = max(errs) <= 0.01 and cfi_ok and residual <= 1e-8 and max(dims) <= 48
    verdict(5, "Hellinger CFI vs 4<G_minus^2>, CFI <= QFI, beamsplitter conjugation", ok,
            f"max rel err {max(errs):.2e}, residual {residual:.1e}; informative: F_Q/F_C limit"
            f" {sweep.ratio_limit:.4f} vs quoted 1.6")
    assert ok


def test_criterion_06_selection_rules(verdict):
    s = make_tmsv(0.6).padded(4)
    quantum = mz_outcome_distribution(s, 1e-3).by_difference()
    forbidden = max(p for d, p in quantum.items() if d % 2 or abs(d) == 2)
    four = quantum.get(4, 0.0) + quantum.get(-4, 0.0)
    asym = mz_outcome_distribution(s, 0.0, chi_c_asym=1e-3).by_difference()
    leak = {d: p for d, p in asym.items() if d != 0}
    dominant = max(leak, key=leak.get)
    base = mz_outcome_distribution(s, 0.0).probabilities
    sym = mz_outcome_distribution(s, 0.0, chi_c_sym=0.37).probabilities
    unchanged = np.array_equal(sym, base)
    ok = forbidden <= 1e-20 and four > 0 and abs(dominant) == 2 and unchanged
    verdict(6, "interferometer selection rules", ok,
            f"odd/2 leakage {forbidden:.1e}, |d|=4 {four:.2e}, asym dominant |d|={abs(dominant)},"
            f" symmetric unchanged={unchanged}")
    assert ok


def test_criterion_07_scaling(verdict):
    Ns = [16, 32, 64, 128, 256]
    sq = scaling_exponent(Ns, sqvac_nuisance_bounds(Ns)).exponent
    cNs = [4, 8, 16, 32, 64, 128]
    plain, nuis = coherent_bounds(cNs)
    coh_plain = scaling_exponent(cNs, plain).exponent
    coh_nuis = scaling_exponent(cNs, nuis).exponent
    tNs = [4, 8, 16, 32, 64]
    thg = scaling_exponent(tNs, [1 / math.sqrt(thg_qfi(make_pump("coherent", N))) for N in tNs]).exponent
    oracle_err = max(_rel(thg_qfi(make_pump("coherent", N)), _thg_oracle(N)) for N in (4, 8, 16))
    leading_err = max(_rel(thg_qfi(make_pump("coherent", N)), 4 * N**3) for N in (4, 8, 16))
    ok = (abs(sq + 2) <= 0.05 and abs(coh_plain + 1.5) <= 0.1 and abs(coh_nuis + 1) <= 0.1
          and abs(thg + 1.5) <= 0.1 and oracle_err <= 1e-9 and leading_err <= 0.02)
    verdict(7, "scaling exponents and harmonic-conversion QFI", ok,
            f"sqvac {sq:.3f}, coherent {coh_plain:.3f}/{coh_nuis:.3f}, harmonic {thg:.3f},"
            f" dense oracle {oracle_err:.1e}, 4N^3 {leading_err:.1e}")
    assert ok


def _thg_oracle(N):
    # dense two-mode construction independent of the structured kernels
    pump = make_coherent(math.sqrt(N)).padded(3)
    da, db = pump.dim, 2
    a = np.kron(annihilation(da).dense(), np.eye(db))
    b = np.kron(np.eye(da), annihilation(db).dense())
    a3 = a @ a @ a
    g = a3 @ b.conj().T
    g = g + g.conj().T
    psi = np.kron(pump.amplitudes, [1.0, 0.0])
    psi = psi / np.linalg.norm(psi)
    mean = np.vdot(psi, g @ psi).real
    return 4 * (np.vdot(g @ psi, g @ psi).real - mean**2)


def test_criterion_08_cumulants(verdict):
    tol = CUMULANT_TOLERANCE
    states = [make_vacuum(4)] + [make_squeezed_vacuum(r, th, tol=tol) for r in (0.3, 1.0) for th in (0.0, 1.1)]
    states += [make_coherent(a, tol=tol) for a in (0.7, 1.5 + 0.5j)]
    worst = 0.0
    for s in states:
        for chi_c in (0.0, 0.4, 2.3):
            evolved = evolve_kerr(s, 0.0, chi_c)
            for theta in (0.0, math.pi / 4, 1.3):
                k = quadrature_cumulants(evolved, theta)
                worst = max(worst, abs(k[2]), abs(k[3]))
    slopes = []
    for r in (0.5, 1.0):
        s = make_squeezed_vacuum(r, tol=tol)
        k4 = [abs(quadrature_cumulants(evolve_kerr(s, chi, 0.0), math.pi / 4)[3]) for chi in (1e-4, 1e-3)]
        slopes.append(math.log10(k4[1] / k4[0]))
    ok = worst <= 1e-9 and all(abs(x - 1) <= 0.05 for x in slopes)
    verdict(8, "Gaussian cumulants vanish, Kerr kappa_4 linear in chi_Q", ok,
            f"max |k3|,|k4| {worst:.1e}, slopes {', '.join(f'{x:.3f}' for x in slopes)}")
    assert ok


def test_criterion_09_null_results(verdict):
    nulls = [mediator_coupling(0), chi_q(CE, 0), co_propagating_interaction(),
             configuration_interaction(CE, "co-propagating")]
    value = chi_q(CE)
    ok = all(x == 0.0 for x in nulls) and _rel(value, 4.28e-52) <= 0.005
    verdict(9, "spin-0 and co-propagating nulls, chi_Q regression", ok,
            f"chi_Q={value:.5g} rad ({value / 4.28e-52 - 1:+.2%})")
    assert ok


def _tree(path):
    return {p.relative_to(path).as_posix(): p.read_bytes() for p in sorted(path.rglob("*")) if p.is_file()}


def test_criterion_10_determinism(tmp_path, verdict):
    runs = [("qfim", "sqvac"), ("qfim", "coherent"), ("qfim", "vacuum"), ("mz", "tmsv-mz"), ("coupling", "ce-450"),
            ("power", "ce-450"), ("power", "ce-1000"), ("power", "ce-450-spin0"), ("thg", "thg"),
            ("cumulants", "cumulants")]
    assert {p for _, p in runs} == set(preset_names())
    for command, preset in runs:
        _cli(tmp_path / "a", command, preset)
        _cli(tmp_path / "b", command, preset)
        _cli(tmp_path / "c", command, preset, "--jobs", "2")
    a, b, c = (_tree(tmp_path / x) for x in "abc")
    ok = len(a) > 0 and a == b == c
    verdict(10, "byte-identical CLI outputs on repeat and with --jobs 2", ok, f"{len(a)} files compared")
    assert ok


if __name__ == "__main__":
    import pytest

    sys.exit(pytest.main([__file__, "-q"]))
