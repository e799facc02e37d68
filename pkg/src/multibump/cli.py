"""Command-line interface: subcommand dispatch, flat key=value config files
with flag override, and result persistence (summary.json, tables/*.csv,
fields/*.bin+.json)."""

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from .ansatz import (Configuration, Potential, algebraic_potential,
                     check_hypotheses, signed_compact_potential,
                     sub_exponential_potential, zero_potential)
from .energy import (full_energy, predicted_energy, reduced_energy,
                     single_bump_grid_energy, two_bump_interaction_study)
from .grid import ConvergenceError, Grid, GridError, save_field
from .groundstate import (Nonlinearity, ShootingError, SpectrumError,
                          compute_ground_state, interaction_constant,
                          linearized_spectrum)
from .maximize import (build_ledger, interior_check, maximize_reduced_energy,
                       multiplier_check, polish_solution)
from .reduction import delta_regime_warning, orthogonality_defect, \
    solve_projected
from .system import (coupled_reduce_and_maximize, coupled_spectrum,
                     estimate_beta_star, interaction_strength,
                     synchronized_amplitudes, weighted_hypothesis_check)
from .verify import SUITES, run_suite

NUMERICAL_ERRORS = (ConvergenceError, GridError, ShootingError,
                    SpectrumError, RuntimeError, np.linalg.LinAlgError)


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# configuration plumbing
# ---------------------------------------------------------------------------

def read_config_file(path):
    """Flat key = value lines; '#' starts a comment."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, val = line.partition("=")
        values[key.strip().replace("-", "_")] = val.strip()
    return values

def build_parser():
    parser = argparse.ArgumentParser(
        prog="multibump",
        description="Multi-spike solutions of nonlinear Schrodinger "
                    "equations with slowly decaying potentials.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--config", help="key = value config file "
                                        "(flags override)")
        p.add_argument("--dim", type=int)
        p.add_argument("--p", type=float, help="leading nonlinearity power")
        p.add_argument("--a", type=float, help="subtracted-term coefficient")
        p.add_argument("--q", type=float, help="subtracted-term power")
        p.add_argument("--potential",
                       choices=["algebraic", "sub_exponential",
                                "signed_compact", "zero"])
        p.add_argument("--potential-m", type=float)
        p.add_argument("--potential-rate", type=float)
        p.add_argument("--amplitude", type=float)
        p.add_argument("--delta", type=float)
        p.add_argument("--rho", type=float)
        p.add_argument("--eta", type=float)
        p.add_argument("--half-width", type=float)
        p.add_argument("--spacing", type=float)
        p.add_argument("--points", help="spike centers, e.g. '0;10' or "
                                        "'0,0;10,0'")
        p.add_argument("--k", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--jobs", type=int)
        p.add_argument("--out", help="output directory")
        p.add_argument("--dump-fields", action="store_true", default=None)
        return p

    common(sub.add_parser("ground-state", help="radial profile, energy, "
                                               "decay constants"))
    common(sub.add_parser("spectrum", help="linearized spectrum and kernel"))
    common(sub.add_parser("reduce", help="projected correction solve"))
    common(sub.add_parser("energy", help="energies and interaction study"))
    common(sub.add_parser("maximize", help="reduced-energy maximization"))
    common(sub.add_parser("ledger", help="energy ledger C_1..C_K"))
    psys = common(sub.add_parser("system", help="coupled cubic system"))
    psys.add_argument("--mu1", type=float)
    psys.add_argument("--mu2", type=float)
    psys.add_argument("--beta", type=float)
    psys.add_argument("--potential-a",
                      choices=["algebraic", "sub_exponential", "zero"])
    psys.add_argument("--potential-b",
                      choices=["algebraic", "sub_exponential", "zero"])
    pver = common(sub.add_parser("verify", help="acceptance suite"))
    pver.add_argument("--suite", choices=sorted(SUITES))
    return parser


DEFAULTS = {"dim": 1, "p": 3.0, "a": 0.0, "q": 2.0, "potential": "algebraic",
            "potential_m": 2.0, "potential_rate": 0.3, "amplitude": 1.0,
            "delta": 1e-9, "rho": 10.0, "eta": 0.75, "half_width": None,
            "spacing": 0.05, "points": None, "k": 2, "seed": 0, "jobs": 1,
            "out": "out", "dump_fields": False, "mu1": 1.0, "mu2": 1.0,
            "beta": 3.0, "potential_a": None, "potential_b": None,
            "suite": "all"}

_CASTS = {"dim": int, "k": int, "seed": int, "jobs": int,
          "dump_fields": lambda s: s.lower() in ("1", "true", "yes")}


def merge_options(args):
    """Defaults < config file < explicit flags."""
    opts = dict(DEFAULTS)
    if getattr(args, "config", None):
        for key, val in read_config_file(args.config).items():
            if key not in opts:
                raise ConfigError(f"unknown config key {key!r}")
            cast = _CASTS.get(key, float if isinstance(DEFAULTS[key], float)
                              or DEFAULTS[key] is None and key != "points"
                              else str)
            if key in ("potential", "potential_a", "potential_b", "out",
                       "suite", "points"):
                cast = str
            opts[key] = cast(val)
    for key in opts:
        flag = getattr(args, key, None)
        if flag is not None:
            opts[key] = flag
    opts["subcommand"] = args.subcommand
    return opts


def parse_points(text, dim):
    pts = []
    for chunk in text.split(";"):
        coords = [float(c) for c in chunk.split(",")]
        if len(coords) != dim:
            raise ConfigError(f"point {chunk!r} has {len(coords)} "
                              f"coordinates, expected {dim}")
        pts.append(coords)
    return np.asarray(pts)


def make_potential(kind, opts):
    if kind in (None, "zero"):
        return zero_potential()
    if kind == "algebraic":
        return algebraic_potential(m=opts["potential_m"],
                                   amplitude=opts["amplitude"])
    if kind == "sub_exponential":
        return sub_exponential_potential(rate=opts["potential_rate"],
                                         amplitude=opts["amplitude"])
    if kind == "signed_compact":
        return signed_compact_potential(m=opts["potential_m"],
                                        amplitude=opts["amplitude"])
    raise ConfigError(f"unknown potential kind {kind!r}")


def make_grid(opts, default_half_width):
    hw = opts["half_width"] if opts["half_width"] is not None \
        else default_half_width
    try:
        return Grid(dim=opts["dim"], half_width=hw, spacing=opts["spacing"])
    except (ValueError, GridError) as exc:
        raise ConfigError(str(exc)) from exc


def make_ground_state(opts):
    try:
        nl = Nonlinearity(opts["p"], opts["a"], opts["q"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return compute_ground_state(nl, opts["dim"])


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, float) and math.isnan(obj):
        return None
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def write_summary(outdir, summary):
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / "summary.json"
    path.write_text(json.dumps(_jsonable(summary), indent=2, sort_keys=True)
                    + "\n")
    return path


def write_table(outdir, name, header, rows):
    tdir = Path(outdir) / "tables"
    tdir.mkdir(parents=True, exist_ok=True)
    with open(tdir / f"{name}.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def dump_field(outdir, name, field):
    fdir = Path(outdir) / "fields"
    fdir.mkdir(parents=True, exist_ok=True)
    save_field(field, fdir / name)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_ground_state(opts):
    gs = make_ground_state(opts)
    summary = {
        "dim": gs.dim, "p": opts["p"], "a": opts["a"], "q": opts["q"],
        "w0": gs.center_value, "w0_tolerance": 1e-6,
        "energy": gs.energy, "energy_tolerance": 1e-4,
        "lambda1": gs.lambda1, "lambda1_tolerance": 1e-3,
        "decay_amplitude": gs.decay_amplitude,
        "decay_rate": gs.decay_rate,
        "kernel_dim": gs.kernel_dim,
        "gamma1": interaction_constant(gs),
        "gamma1_tolerance_rel": 1e-3,
    }
    write_table(opts["out"], "profile", ["r", "w", "w_prime"],
                zip(gs.r_table, gs.w_table, gs.wp_table))
    return summary


def cmd_spectrum(opts):
    gs = make_ground_state(opts)
    report = linearized_spectrum(gs)
    write_table(opts["out"], "spectrum",
                ["eigenvalue", "sector", "multiplicity"],
                report.eigenvalues)
    return {"lambda1": report.lambda1, "lambda1_tolerance": 1e-3,
            "kernel_dim": report.kernel_dim,
            "kernel_tolerance": 1e-4,
            "positive_count": report.positive_count,
            "nondegenerate": report.kernel_dim == gs.dim}


def _reduce_setup(opts):
    gs = make_ground_state(opts)
    if opts["points"] is None:
        raise ConfigError("reduce/energy need --points")
    pts = parse_points(opts["points"], opts["dim"])
    config = Configuration(pts, opts["rho"])
    extent = float(np.max(np.abs(pts))) if pts.size else 0.0
    grid = make_grid(opts, default_half_width=extent + 35.0)
    potential = make_potential(opts["potential"], opts)
    return gs, config, grid, potential


def cmd_reduce(opts):
    gs, config, grid, potential = _reduce_setup(opts)
    result = solve_projected(config, potential, opts["delta"], gs, grid)
    warning = delta_regime_warning(opts["delta"], opts["rho"])
    summary = {
        "star_norm": result.star_norm,
        "h1_norm": result.h1_norm,
        "newton_iterations": result.newton_iterations,
        "final_residual": result.final_residual,
        "residual_tolerance": 1e-10,
        "multiplier_max": float(np.max(np.abs(result.multipliers))),
        "orthogonality_defect": orthogonality_defect(result, gs),
        "orthogonality_tolerance": 1e-10,
        "delta_regime_warning": warning,
    }
    if opts["dump_fields"]:
        dump_field(opts["out"], "correction", result.phi)
        dump_field(opts["out"], "corrected", result.corrected())
    return summary


def cmd_energy(opts):
    gs, config, grid, potential = _reduce_setup(opts)
    delta = opts["delta"]
    value = reduced_energy(config, potential, delta, gs, grid)
    predicted = predicted_energy(config, potential, delta, gs, grid=grid)
    rows = two_bump_interaction_study(gs, [10.0, 12.0, 14.0], grid) \
        if grid.half_width >= 19.0 and config.dim == 1 else []
    if rows:
        write_table(opts["out"], "interaction",
                    ["d", "excess", "predicted", "ratio"],
                    [(r.d, r.excess, r.predicted, r.ratio) for r in rows])
    return {
        "reduced_energy": value,
        "bump_energy_grid": single_bump_grid_energy(gs, grid),
        "predicted": predicted,
        "prediction_model_tolerance_rel": 0.3,
        "k": config.k,
    }


def cmd_maximize(opts):
    gs = make_ground_state(opts)
    grid = make_grid(opts, default_half_width=68.0)
    potential = make_potential(opts["potential"], opts)
    record = maximize_reduced_energy(
        opts["k"], potential, opts["delta"], gs, grid, rho=opts["rho"],
        seed=opts["seed"], jobs=opts["jobs"])
    mult = multiplier_check(record, potential, opts["delta"], gs, grid)
    polish = polish_solution(record, potential, opts["delta"], gs, grid)
    if opts["dump_fields"]:
        dump_field(opts["out"], "solution", polish.solution)
    return {
        "value": record.value,
        "points": record.config.points,
        "interior_margin": record.interior_margin,
        "boundary_distance": record.boundary_distance,
        "interior": interior_check(record, opts["rho"]),
        "supremum_flag": record.supremum_flag,
        "multiplier_max": mult.multiplier_max,
        "multiplier_tolerance": 1e-8,
        "gram_diagonally_dominant": mult.diagonally_dominant,
        "polish_residual": polish.residual,
        "polish_residual_tolerance": 1e-10,
        "n_local_maxima": polish.n_local_maxima,
        "restarts_used": record.restarts_used,
        "seed": opts["seed"],
    }


def cmd_ledger(opts):
    if opts["potential"] in (None, "zero") and opts["delta"] > 0:
        raise ConfigError("ledger needs a decaying potential "
                          "(--potential) when delta > 0")
    gs = make_ground_state(opts)
    grid = make_grid(opts, default_half_width=68.0)
    potential = make_potential(opts["potential"], opts)
    ledger = build_ledger(opts["k"], potential, opts["delta"], gs, grid,
                          rho=opts["rho"], seed=opts["seed"])
    write_table(opts["out"], "ledger",
                ["k", "C_k", "increment", "noise_floor",
                 "interior_margin", "multiplier_max"],
                [(e.k, e.value, e.increment, ledger.noise_floor,
                  e.interior_margin, e.multiplier_max)
                 for e in ledger.entries])
    return {
        "values": [e.value for e in ledger.entries],
        "increments": [e.increment for e in ledger.entries[1:]],
        "bump_energy": ledger.bump_energy,
        "noise_floor": ledger.noise_floor,
        "increments_strict": ledger.increments_strict,
        "flags": ledger.flags,
        "seed": opts["seed"],
    }


def cmd_system(opts):
    try:
        params = synchronized_amplitudes(opts["mu1"], opts["mu2"],
                                         opts["beta"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    gs = make_ground_state({**opts, "p": 3.0, "a": 0.0, "q": 2.0})
    spec = coupled_spectrum(params, gs)
    pot_a = make_potential(opts["potential_a"] or opts["potential"], opts)
    pot_b = make_potential(opts["potential_b"] or opts["potential"], opts)
    hyp = weighted_hypothesis_check(pot_a, pot_b, params, dim=opts["dim"])
    grid = make_grid(opts, default_half_width=68.0)
    record, polish = coupled_reduce_and_maximize(
        opts["k"], pot_a, pot_b, opts["delta"], params, gs, grid,
        rho=opts["rho"], seed=opts["seed"])
    if opts["dump_fields"]:
        dump_field(opts["out"], "component_u", polish.solution.u)
        dump_field(opts["out"], "component_v", polish.solution.v)
    return {
        "alpha": params.alpha, "gamma": params.gamma,
        "admissible": params.admissible,
        "interaction_strength_A": interaction_strength(params),
        "kernel_dim": spec.kernel_dim,
        "positive_count": spec.positive_count,
        "nondegenerate": spec.nondegenerate,
        "weighted_hypotheses_pass": hyp.passed,
        "value": record.value,
        "points": record.config.points,
        "polish_residual": polish.residual,
        "polish_residual_tolerance": 1e-10,
        "symmetry_defect": polish.symmetry_defect,
        "seed": opts["seed"],
    }


def cmd_verify(opts):
    results = run_suite(opts["suite"])
    summary = {
        "suite": opts["suite"],
        "passed": all(r.passed for r in results),
        "criteria": [{"index": r.index, "name": r.name,
                      "passed": r.passed, "runtime_s": r.runtime,
                      "details": r.details} for r in results],
    }
    write_table(opts["out"], "verify", ["criterion", "name", "passed"],
                [(r.index, r.name, r.passed) for r in results])
    return summary


COMMANDS = {"ground-state": cmd_ground_state, "spectrum": cmd_spectrum,
            "reduce": cmd_reduce, "energy": cmd_energy,
            "maximize": cmd_maximize, "ledger": cmd_ledger,
            "system": cmd_system, "verify": cmd_verify}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opts = merge_options(args)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        summary = COMMANDS[opts["subcommand"]](opts)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NUMERICAL_ERRORS as exc:
        write_summary(opts["out"],
                      {"error": f"{type(exc).__name__}: {exc}"})
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    path = write_summary(opts["out"], summary)
    print(path)
    if opts["subcommand"] == "verify" and not summary["passed"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
