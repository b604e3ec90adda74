"""gravkerr command line: qfim, mz, coupling, power, thg, cumulants.

Each subcommand reads a config file (or a shipped preset), writes CSV/JSON
reports into the output directory and prints the JSON summary.

Exit codes: 0 success, 2 config error, 3 numerical tolerance failure,
4 infeasible scenario.
"""
from __future__ import annotations

import argparse
import math
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .config import ConfigError, RunConfig, load_config, load_preset, preset_names
from .constants import DEFAULT_TOLERANCE
from .coupling import (
    CavityGeometry,
    chi_q,
    configuration_interaction,
    geometric_factor_asymptotic,
    geometric_factor_exact,
    geometric_factor_quadrature,
    interaction_hamiltonian_coefficient,
    mediator_coupling,
)
from .errors import AccuracyError, ContractViolation, IncompleteScenarioError, SeriesError, TruncationError
from .fock import (
    make_coherent,
    make_squeezed_vacuum,
    make_tmsv,
    make_vacuum,
)
from .generators import evolve_kerr
from .metrology import (
    CUMULANT_TOLERANCE,
    analytic_coherent_qfim,
    analytic_mz_cfi,
    analytic_sqvac_qfim,
    extrapolated_mz_cfi,
    metrology_report,
    mz_fisher_ratio_sweep,
    mz_outcome_distribution,
    mz_qfi,
    nuisance_qcrb,
    quadrature_cumulants,
    scaling_exponent,
    single_parameter_qcrb,
    make_pump,
    thg_harmonic_population,
    thg_qfi,
)
from .output import write_csv, write_json
from .planner import Scenario, circulating_power_bound, feasibility_check, interrogation_time, shots

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_INFEASIBLE = 0, 2, 3, 4


class Context:
    def __init__(self, config: RunConfig, out: Path, tolerance: float, convention: str, jobs: int):
        self.config = config
        self.out = out
        self.tolerance = tolerance
        self.convention = convention
        self.jobs = jobs
        self.checks = []

    def check(self, name, value, target, rel_tol, *, note=None):
        """Record a relative-tolerance check; a failed check sets exit code 3."""
        if target == 0:
            ok = abs(value) <= rel_tol
            rel = abs(value)
        else:
            rel = abs(value / target - 1)
            ok = rel <= rel_tol
        entry = {"name": name, "value": value, "target": target, "relative_error": rel, "tolerance": rel_tol,
                 "pass": bool(ok)}
        if note:
            entry["note"] = note
        self.checks.append(entry)
        return ok

    def check_bool(self, name, ok, note=None):
        entry = {"name": name, "pass": bool(ok)}
        if note:
            entry["note"] = note
        self.checks.append(entry)
        return ok

    def map(self, fn, items):
        items = list(items)
        if self.jobs <= 1 or len(items) < 2:
            return [fn(x) for x in items]
        with ProcessPoolExecutor(max_workers=self.jobs) as pool:
            # map preserves input order, so merged output does not depend on scheduling
            return list(pool.map(fn, items))


def _quoted(config, key, computed):
    value = config.get("quoted", key)
    if value is None:
        return None
    return {"computed": computed, "quoted": value, "relative_difference": computed / value - 1}


def _geometry(config) -> CavityGeometry:
    g = config.section("geometry")
    missing = [k for k in ("arm_length", "separation", "finesse", "wavelength") if k not in g]
    if missing:
        raise ConfigError(f"[geometry] is missing {', '.join(missing)}")
    try:
        return CavityGeometry(g["arm_length"], g["separation"], g["finesse"], g["wavelength"], g.get("beam_width"))
    except ValueError as exc:
        raise ConfigError(str(exc), field="[geometry]") from None


def _geometry_dict(geom):
    return {"arm_length_m": geom.arm_length, "separation_m": geom.separation, "finesse": geom.finesse,
            "wavelength_m": geom.wavelength, "beam_width_m": geom.beam_width}


def _state_grid(config):
    """(kind, [(state parameter, mean photon number)]) from the [state] section."""
    st = config.section("state")
    kind = config.require("state", "kind")
    if kind == "vacuum":
        return kind, [("-", 0.0)]
    if kind == "coherent":
        if "alpha" in st:
            return kind, [(a, a * a) for a in st["alpha"]]
        return kind, [(math.sqrt(n), n) for n in config.require("state", "mean_photons")]
    if kind in ("squeezed-vacuum", "tmsv"):
        if "r" in st:
            return kind, [(r, math.sinh(r) ** 2) for r in st["r"]]
        return kind, [(math.asinh(math.sqrt(n)), n) for n in config.require("state", "mean_photons")]
    raise ConfigError(f"unsupported state kind {kind!r}")


# ---------------------------------------------------------------------------
# qfim


def _qfim_point(args):
    kind, param, mean, tol, dim = args
    if kind == "vacuum":
        state = make_vacuum(dim or 8)
        analytic = None
    elif kind == "coherent":
        state = make_coherent(param, dim=dim, tol=tol)
        analytic = analytic_coherent_qfim(mean)
    else:
        state = make_squeezed_vacuum(param, dim=dim, tol=tol)
        analytic = analytic_sqvac_qfim(mean)[0]
    report = metrology_report(state, state_descriptor=f"{kind}")
    F = report.qfim
    return {
        "param": param, "N": mean, "dim": state.dim, "tail_bound": state.tail_bound,
        "F": F, "bound": report.qcrb_nuisance, "bound_plain": single_parameter_qcrb(F),
        "bound_analytic": math.inf if analytic is None else nuisance_qcrb(analytic),
        "report": report.to_dict(),
    }


def cmd_qfim(ctx: Context):
    config = ctx.config
    kind, grid = _state_grid(config)
    if kind == "tmsv":
        raise ConfigError("qfim works on single-mode states", field="[state] kind")
    shots_ = config.get("state", "shots", 1.0)
    dim = config.get("state", "dim")
    points = ctx.map(_qfim_point, [(kind, p, n, ctx.tolerance, dim) for p, n in grid])
    rows = []
    for pt in points:
        F = pt["F"]
        scale = 1.0 / math.sqrt(shots_)
        rows.append([pt["N"], F[0, 0], F[0, 1], F[1, 1], pt["bound"] * scale, pt["bound_analytic"] * scale])
        if math.isfinite(pt["bound_analytic"]):
            ctx.check(f"bound ratio N={pt['N']:.6g}", pt["bound"], pt["bound_analytic"], 1e-3)
    write_csv(ctx.out / "qfim_sweep.csv", ["N", "F_QQ", "F_QC", "F_CC", "bound_numeric", "bound_analytic"], rows)
    summary = {
        "command": "qfim",
        "state_kind": kind,
        "shots": shots_,
        "tolerance": ctx.tolerance,
        "points": [{"parameter": pt["param"], "N": pt["N"], "dim": pt["dim"], "tail_bound": pt["tail_bound"],
                    **pt["report"]} for pt in points],
    }
    if kind == "vacuum":
        ctx.check_bool("vacuum QFIM singular", summary["points"][0]["qcrb_nuisance"] == "indistinguishable")
    finite = [pt for pt in points if pt["N"] > 0 and math.isfinite(pt["bound"])]
    if len(finite) >= 4:
        Ns = [pt["N"] for pt in finite]
        fits = {"nuisance": scaling_exponent(Ns, [pt["bound"] for pt in finite]).__dict__}
        if kind == "coherent":
            fits["no_nuisance"] = scaling_exponent(Ns, [pt["bound_plain"] for pt in finite]).__dict__
        summary["scaling_fits"] = fits
        keys = {"coherent": (("coherent_exponent", "no_nuisance"), ("coherent_nuisance_exponent", "nuisance")),
                "squeezed-vacuum": (("sqvac_nuisance_exponent", "nuisance"),)}
        quoted = {}
        for key, fit_key in keys.get(kind, ()):
            q = _quoted(config, key, fits[fit_key]["exponent"])
            if q:
                quoted[key] = q
        if quoted:
            summary["quoted_comparison"] = quoted
    return summary


# ---------------------------------------------------------------------------
# mz


def _dist_rows(dist):
    p = dist.probabilities
    return [[i, j, float(p[i, j])] for i in range(p.shape[0]) for j in range(p.shape[1])]


def cmd_mz(ctx: Context):
    config = ctx.config
    kind, grid = _state_grid(config)
    if kind != "tmsv" or len(grid) != 1:
        raise ConfigError("mz needs a single tmsv state", field="[state]")
    r = grid[0][0]
    state = make_tmsv(r, phi=config.get("state", "phase", 0.0), dim=config.get("state", "dim"), tol=ctx.tolerance)
    mz = config.section("mz")
    chi = mz.get("chi_q", 1e-3)
    sym, asym = mz.get("chi_c_sym", 0.0), mz.get("chi_c_asym", 0.0)
    scale = 2.0 if ctx.convention == "unhalved" else 1.0
    d0 = mz_outcome_distribution(state, 0.0)
    d1 = mz_outcome_distribution(state, scale * chi, sym, asym)
    write_csv(ctx.out / "mz_chi0.csv", ["n1", "n2", "p"], _dist_rows(d0))
    write_csv(ctx.out / "mz_chi.csv", ["n1", "n2", "p"], _dist_rows(d1))
    f_hel = extrapolated_mz_cfi(state, chi=mz.get("step", 1e-3), convention=ctx.convention)
    f_an = analytic_mz_cfi(state, ctx.convention)
    f_q = mz_qfi(state, ctx.convention)
    by_diff = d1.by_difference()
    odd = max((p for k, p in by_diff.items() if k % 2), default=0.0)
    ctx.check("hellinger vs analytic CFI", f_hel, f_an, 1e-2)
    ctx.check_bool("CFI <= QFI", f_hel <= f_q * (1 + 1e-12))
    ctx.check_bool("odd |n1-n2| channels empty", odd == 0.0)
    summary = {
        "command": "mz",
        "r": r,
        "mean_photons_per_mode": math.sinh(r) ** 2,
        "dim": state.dim,
        "chi_q": chi,
        "chi_c_sym": sym,
        "chi_c_asym": asym,
        "convention": ctx.convention,
        "F_C_hellinger": f_hel,
        "F_C_analytic": f_an,
        "F_Q": f_q,
        "ratio_FQ_FC": f_q / f_an,
        "selection_rules": {
            "max_probability_odd_difference": odd,
            "probability_by_difference": {str(k): v for k, v in sorted(by_diff.items()) if abs(k) <= 6},
        },
    }
    if "ratio_mean_photons" in mz:
        sweep = mz_fisher_ratio_sweep(mz["ratio_mean_photons"], ctx.convention, ctx.tolerance)
        summary["ratio_sweep"] = {
            "mean_photons": sweep.mean_photons,
            "ratios": sweep.ratios,
            "ratio_limit": sweep.ratio_limit,
            "F_C_nbar4_coefficient": sweep.coeff_classical,
            "F_Q_nbar4_coefficient": sweep.coeff_quantum,
        }
        q = _quoted(config, "fisher_ratio", sweep.ratio_limit)
        if q:
            q["annotation"] = "quoted claim, informative only"
            summary["quoted_comparison"] = {"fisher_ratio": q}
    return summary


# ---------------------------------------------------------------------------
# coupling


def _grid_point(args):
    ratio, w = args
    L = ratio * w
    exact = geometric_factor_exact(L, w)
    try:
        quad = geometric_factor_quadrature(L, w)
    except AccuracyError as exc:
        quad = exc.estimate
    asym = geometric_factor_asymptotic(L, w) if ratio > 1 else math.nan
    return [ratio, L, w, exact, quad, quad / exact - 1, asym, asym / exact - 1]


def cmd_coupling(ctx: Context):
    config = ctx.config
    geom = _geometry(config)
    cp = config.section("coupling")
    spin = cp.get("mediator_spin", 2)
    try:
        multiplier = mediator_coupling(spin)
    except ValueError as exc:
        raise ConfigError(str(exc), field="[coupling] mediator_spin") from None
    mode = cp.get("mode", "asymptotic")
    configuration = cp.get("configuration", "counter-propagating")
    chi = chi_q(geom, spin)
    coeff = configuration_interaction(geom, configuration, mode) * multiplier
    tau = interrogation_time(geom)
    summary = {
        "command": "coupling",
        "geometry": _geometry_dict(geom),
        "mediator_spin": spin,
        "mediator_multiplier": multiplier,
        "configuration": configuration,
        "mode": mode,
        "chi_q_rad": chi,
        "hamiltonian_coefficient_J": coeff,
        "exact_to_asymptotic_coefficient_ratio": (interaction_hamiltonian_coefficient(geom, "exact")
                                                  / interaction_hamiltonian_coefficient(geom, "asymptotic")),
        "interrogation_time_s": tau,
    }
    ratios = cp.get("grid_ratios")
    if ratios:
        rows = ctx.map(_grid_point, [(x, geom.separation) for x in ratios])
        write_csv(ctx.out / "coupling_grid.csv",
                  ["L_over_w", "L", "w", "exact", "quadrature", "quadrature_rel_diff", "asymptotic",
                   "asymptotic_rel_diff"], rows)
        worst = max(abs(r[5]) for r in rows)
        ctx.check("quadrature vs closed form (worst)", worst, 0.0, 1e-10)
        summary["grid_worst_quadrature_rel_diff"] = worst
    return summary


# ---------------------------------------------------------------------------
# power


def _power_point(args):
    geom, T = args
    return circulating_power_bound(geom, T)


def cmd_power(ctx: Context):
    config = ctx.config
    geom = _geometry(config)
    sc = config.section("scenario")
    T = config.require("scenario", "total_time")
    spin = sc.get("mediator_spin", 2)
    bound = circulating_power_bound(geom, T)
    summary = {
        "command": "power",
        "label": sc.get("label", ""),
        "geometry": _geometry_dict(geom),
        "total_time_s": T,
        "interrogation_time_s": interrogation_time(geom),
        "shots": shots(T, geom),
        "chi_q_rad": chi_q(geom, spin),
        "circulating_power_bound_W": bound,
        "pump_power_bound_W": bound / geom.finesse,
    }
    if geom.beam_width:
        summary["circulating_intensity_at_bound_W_per_m2"] = bound / geom.beam_width**2
    quoted = {}
    for key, value in (("circulating_power", bound), ("pump_power", bound / geom.finesse)):
        q = _quoted(config, key, value)
        if q:
            quoted[key] = q
    if geom.beam_width:
        q = _quoted(config, "intensity", bound / geom.beam_width**2)
        if q:
            quoted["intensity"] = q
    if quoted:
        summary["quoted_comparison"] = quoted

    # closure: power at which chi_q meets the nuisance bound vs the closed form
    closure = feasibility_check(Scenario(geom, T, circulating_power=bound, mediator_spin=spin, label="closure"))
    summary["closure"] = {"marginal_power_W": closure.marginal_power, "relative_difference": closure.closure}
    if spin == 2:
        ctx.check("closure marginal power vs bound", closure.marginal_power, bound, 0.03)

    infeasible = False
    if "pump_power" in sc or "circulating_power" in sc:
        report = feasibility_check(Scenario(geom, T, sc.get("pump_power"), sc.get("circulating_power"),
                                            sc.get("label", ""), spin))
        summary["feasibility"] = report.to_dict()
        infeasible = not report.feasible
    elif spin != 2:
        infeasible = True
        summary["feasibility"] = {"status": "fail", "reason": "mediator does not couple"}

    times = sc.get("time_sweep")
    if times:
        values = ctx.map(_power_point, [(geom, t) for t in times])
        write_csv(ctx.out / "power_time_sweep.csv", ["T_s", "circulating_power_W", "pump_power_W", "T_quarter_law"],
                  [[t, p, p / geom.finesse, p / values[0] * (t / times[0]) ** 0.25] for t, p in zip(times, values)])
    return summary, infeasible


# ---------------------------------------------------------------------------
# thg


def _thg_point(args):
    kind, N, dim_h, tol = args
    return thg_qfi(make_pump(kind, N, tol), dim_h)


def _thg_population(args):
    kind, N, chi, tol = args
    return thg_harmonic_population(make_pump(kind, N, tol), chi)


def cmd_thg(ctx: Context):
    config = ctx.config
    th = config.section("thg")
    pumps = th.get("pumps", ["coherent"])
    Ns = th.get("mean_photons", [4, 8, 16, 32, 64])
    dim_h = th.get("dim_harmonic", 2)
    summary = {"command": "thg", "dim_harmonic": dim_h, "pumps": {}}
    rows = []
    for kind in pumps:
        F = ctx.map(_thg_point, [(kind, N, dim_h, ctx.tolerance) for N in Ns])
        bounds = [1 / math.sqrt(f) for f in F]
        fit = scaling_exponent(Ns, bounds)
        entry = {"mean_photons": list(Ns), "qfi": F, "bound": bounds, "bound_fit": fit.__dict__}
        if kind == "coherent":
            entry["qfi_over_4N3"] = [f / (4 * N**3) for f, N in zip(F, Ns)]
            for f, N in zip(F, Ns):
                if N <= 16:
                    ctx.check(f"coherent THG QFI vs 4N^3 at N={N:g}", f, 4 * N**3, 0.02)
            q = _quoted(config, "thg_exponent", fit.exponent)
            if q:
                entry["quoted_comparison"] = q
        summary["pumps"][kind] = entry
        rows += [[kind, N, f, b] for N, f, b in zip(Ns, F, bounds)]
    write_csv(ctx.out / "thg_sweep.csv", ["pump", "N", "qfi", "bound"], rows)
    chis = th.get("population_chi")
    if chis:
        N0 = th.get("population_mean_photons", 8.0)
        pops = ctx.map(_thg_population, [("coherent", N0, c, ctx.tolerance) for c in chis])
        fit = scaling_exponent(chis, pops)
        summary["harmonic_population"] = {"mean_photons": N0, "chi": list(chis), "population": pops,
                                          "fit": fit.__dict__}
        ctx.check("harmonic population slope", fit.exponent, 2.0, 0.01)
    return summary


# ---------------------------------------------------------------------------
# cumulants


def cmd_cumulants(ctx: Context):
    config = ctx.config
    kind, grid = _state_grid(config)
    if kind == "tmsv":
        raise ConfigError("cumulants work on single-mode states", field="[state] kind")
    cu = config.section("cumulants")
    theta = cu.get("theta", math.pi / 4)
    chis = cu.get("chi_q", [1e-4, 2e-4, 4e-4, 8e-4])
    chi_c = cu.get("chi_c", 0.1)
    cases = []
    for param, mean in grid:
        if kind == "vacuum":
            state = make_vacuum(8)
        elif kind == "coherent":
            state = make_coherent(param, tol=min(ctx.tolerance, CUMULANT_TOLERANCE))
        else:
            state = make_squeezed_vacuum(param, tol=min(ctx.tolerance, CUMULANT_TOLERANCE))
        base = quadrature_cumulants(state, theta)
        classical = quadrature_cumulants(evolve_kerr(state, 0.0, chi_c), theta)
        kerr = [quadrature_cumulants(evolve_kerr(state, c, 0.0), theta) for c in chis]
        case = {"parameter": param, "N": mean, "dim": state.dim, "gaussian": base,
                "classical_evolution": classical, "kerr": {"chi_q": list(chis), "cumulants": kerr}}
        ctx.check("gaussian kappa3,kappa4", max(abs(base[2]), abs(base[3])), 0.0, 1e-9)
        ctx.check("classical-evolution kappa3,kappa4", max(abs(classical[2]), abs(classical[3])), 0.0, 1e-9)
        k4 = [abs(k[3]) for k in kerr]
        # below ~1e-8 the fourth cumulant is truncation noise and a fit is meaningless
        if mean > 0 and len(chis) >= 4 and min(k4) > 1e-8:
            fit = scaling_exponent(chis, k4)
            case["kappa4_fit"] = fit.__dict__
        cases.append(case)
    return {"command": "cumulants", "state_kind": kind, "theta_rad": theta, "chi_c": chi_c, "cases": cases}


COMMANDS = {
    "qfim": (cmd_qfim, "quantum Fisher information sweep and nuisance bounds"),
    "mz": (cmd_mz, "interferometric photon counting, classical vs quantum Fisher information"),
    "coupling": (cmd_coupling, "self-interaction strength and overlap-integral table"),
    "power": (cmd_power, "required circulating power and feasibility"),
    "thg": (cmd_thg, "third-harmonic conversion Fisher information scaling"),
    "cumulants": (cmd_cumulants, "quadrature cumulants under Gaussian and Kerr evolution"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gravkerr", description="Gravitational Kerr self-interaction workbench.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", nargs="?", help="config file (INI with unit-suffixed values)")
        p.add_argument("--preset", help=f"shipped preset ({', '.join(preset_names())})")
        p.add_argument("--out", help="output directory (default: [run] out or ./gravkerr-out)")
        p.add_argument("--tolerance", type=float, help="Fock truncation tail tolerance")
        p.add_argument("--convention", choices=["half", "unhalved"], help="interferometer generator convention")
        p.add_argument("--seed", type=int, help="reserved; no stochastic paths")
        p.add_argument("--jobs", type=int, help="worker processes for sweeps")
        p.add_argument("--quiet", action="store_true", help="do not print the summary")
    return parser


def _context(args) -> Context:
    if bool(args.config) == bool(args.preset):
        raise ConfigError("give exactly one of a config file or --preset")
    config = load_preset(args.preset) if args.preset else load_config(args.config)
    run = config.section("run")
    tolerance = args.tolerance if args.tolerance is not None else run.get("tolerance", DEFAULT_TOLERANCE)
    if not 0 < tolerance < 1:
        raise ConfigError("tolerance must lie in (0, 1)")
    convention = args.convention or run.get("convention", "half")
    jobs = args.jobs if args.jobs is not None else run.get("jobs", 1)
    if jobs < 1:
        raise ConfigError("jobs must be >= 1")
    out = Path(args.out or run.get("out", "gravkerr-out"))
    return Context(config, out, tolerance, convention, jobs)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        ctx = _context(args)
        fn = COMMANDS[args.command][0]
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            result = fn(ctx)
        summary, infeasible = result if isinstance(result, tuple) else (result, False)
    except ConfigError as exc:
        print(f"gravkerr: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IncompleteScenarioError as exc:
        print(f"gravkerr: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TruncationError, SeriesError, AccuracyError, ContractViolation) as exc:
        print(f"gravkerr: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    summary["convention"] = ctx.convention
    summary["warnings"] = sorted({str(w.message) for w in caught})
    summary["checks"] = ctx.checks
    failed = [c["name"] for c in ctx.checks if not c["pass"]]
    summary["status"] = "infeasible" if infeasible else ("tolerance-failure" if failed else "ok")
    path = write_json(ctx.out / f"{args.command}_report.json", summary)
    if not args.quiet:
        print(path.read_text(encoding="utf-8"), end="")
    if failed:
        print(f"gravkerr: checks failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_NUMERICAL
    if infeasible:
        return EXIT_INFEASIBLE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
