"""Command-line entry point: analyses and experiments with CSV/JSON artifacts.

Exit codes: 0 all asserted checks passed, 1 a check failed, 2 configuration
error, 3 solver abort.  Every run is reproducible from (command, config,
seed); CSV cells use 17 significant digits so round trips are bit-stable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import causality, characteristics, experiments, solver1d, verification
from .config import ConfigError, load_config
from .solver1d import SolverAbort, SolverConfig

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_SOLVER = 3


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def _write_csv(path: Path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_json(path: Path, payload: dict):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")


def _outdir(cfg, args) -> Path:
    return Path(args.out if args.out else cfg["output"]["dir"])


def _solver_config(cfg) -> SolverConfig:
    s = cfg["solver"]
    ic_name = s["ic"]
    if ic_name == "constant":
        ic = solver1d.constant_state(eps0=s["eps0"])
    elif ic_name == "gaussian-eps-pulse":
        ic = solver1d.gaussian_pulse(amplitude=s["ic_amplitude"], width=s["ic_width"],
                                     center=s["ic_center"], eps0=s["eps0"])
    else:
        ic = solver1d.shear_pulse(amplitude=s["ic_amplitude"], width=s["ic_width"],
                                  center=s["ic_center"], eps0=s["eps0"])
    return SolverConfig(transport=cfg.transport_model(), n_cells=s["n_cells"],
                        length=s["length"], cfl=s["cfl"], t_end=s["t_end"], ic=ic,
                        filter_strength=s["filter_strength"],
                        output_every=s["output_every"])


def cmd_gevrey(cfg, args) -> int:
    fluid = characteristics.gevrey_index(characteristics.FLUID_FACTORS)
    coupled = characteristics.gevrey_index(characteristics.COUPLED_FACTORS)
    print("factor bookkeeping:")
    for name, fs in (("fluid", characteristics.FLUID_FACTORS),
                     ("coupled", characteristics.COUPLED_FACTORS)):
        parts = ", ".join(f"{e.multiplicity} x degree-{e.degree} ({e.family})"
                          for e in fs.entries)
        print(f"  {name}: {parts}; Q = {fs.factor_count}, "
              f"total degree {fs.total_degree}")
    print(f"fluid Gevrey index:   {fluid}")
    print(f"coupled Gevrey index: {coupled}")
    ok = fluid == Fraction(7, 6) and coupled == Fraction(17, 16)
    payload = {
        "check": "gevrey-indices",
        "parameters": {"a1": cfg["transport"]["a1"], "a2": cfg["transport"]["a2"]},
        "seed": None,
        "tolerances": {"exact": True},
        "fluid_index": str(fluid),
        "coupled_index": str(coupled),
        "passed": ok,
    }
    _write_json(_outdir(cfg, args) / "gevrey.json", payload)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_verify_factorization(cfg, args) -> int:
    samples = args.samples or cfg["verification"]["samples"]
    seed = args.seed if args.seed is not None else cfg["verification"]["seed"]
    report = verification.factorization_suite(samples=samples, seed=seed,
                                              threads=args.threads)
    _write_json(_outdir(cfg, args) / "verify_factorization.json", report.to_json())
    print(f"determinant factorization: {samples} samples, "
          f"max scaled error {report.max_scaled_error:.3e} "
          f"(tolerance {report.tolerance:.0e}) -> "
          f"{'PASS' if report.passed else 'FAIL'}")
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_roots(cfg, args) -> int:
    samples = args.samples or 1000
    seed = args.seed if args.seed is not None else cfg["verification"]["seed"]
    report = verification.roots_suite(samples=samples, seed=seed)
    rows = []
    rng_rows = min(samples, 200)
    from .characteristics import bisection_roots, shear_cone_roots, sound_cone_roots
    from .constitutive import TransportModel
    from .symbol import StatePoint
    from .tensor import minkowski
    g = minkowski()
    for idx in range(rng_rows):
        rng = np.random.default_rng((seed, idx))
        a2 = rng.uniform(4.0, 12.0)
        w = rng.uniform(-3.0, 3.0, 3) * rng.uniform(0.0, 1.0)
        u = np.array([np.sqrt(1.0 + w @ w), *w])
        s = StatePoint(eps=rng.uniform(0.5, 2.0), u=u, g=g,
                       transport=TransportModel(a1=4.0, a2=a2))
        xibar = rng.normal(size=3)
        xibar /= np.linalg.norm(xibar)
        for family, closed in (("shear", shear_cone_roots), ("sound", sound_cone_roots)):
            pair = closed(xibar, u, a2)
            scan = bisection_roots(s, xibar, family)
            exact = sorted(pair.as_set())
            numeric = list(scan.roots) + [np.nan] * (2 - len(scan.roots))
            err = max(abs(exact[i] - numeric[i]) for i in range(min(2, len(scan.roots))))
            rows.append([family, a2, w @ w, exact[0], exact[1],
                         numeric[0], numeric[1], err])
    out = _outdir(cfg, args)
    _write_csv(out / "roots.csv",
               ["family", "a2", "u2", "closed_minus", "closed_plus",
                "numeric_minus", "numeric_plus", "abs_error"], rows)
    _write_json(out / "roots.json", report.to_json())
    print(f"roots: max |closed - numeric| = "
          f"{max(report.max_root_error.values()):.3e} -> "
          f"{'PASS' if report.passed else 'FAIL'}")
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_causality_scan(cfg, args) -> int:
    scan = cfg["scan"]
    rows = causality.causality_scan(scan["a2_list"], scan["u_max"],
                                    n_u=scan["u_steps"], n_theta=scan["theta_steps"],
                                    a1=cfg["transport"]["a1"])
    out = _outdir(cfg, args)
    _write_csv(out / "causality_scan.csv",
               ["a1", "a2", "u2", "theta_max_p2", "smax_p2", "smax_p3", "verdict"],
               [[r.a1, r.a2, r.u2, r.theta_max_p2, r.smax_p2, r.smax_p3, r.verdict]
                for r in rows])
    n_violated = sum(1 for r in rows if r.verdict == "violated")
    worst_p2 = max(r.smax_p2 for r in rows)
    worst_p3 = max(r.smax_p3 for r in rows)
    payload = {
        "check": "causality-scan",
        "parameters": {"a1": cfg["transport"]["a1"], "a2_list": scan["a2_list"],
                       "u_max": scan["u_max"], "theta_steps": scan["theta_steps"]},
        "seed": None,
        "tolerances": {"boundary": causality.BOUNDARY_TOL},
        "rows": len(rows),
        "max_smax_p2": worst_p2,
        "max_smax_p3": worst_p3,
        "violated_cells": n_violated,
        "passed": n_violated == 0,
    }
    _write_json(out / "causality_scan.json", payload)
    print(f"causality scan: {len(rows)} cells, max shear slope {worst_p2:.6f}, "
          f"max sound slope {worst_p3:.6f}, violations {n_violated}")
    return EXIT_OK if n_violated == 0 else EXIT_CHECK_FAILED


def cmd_region_map(cfg, args) -> int:
    scan = cfg["scan"]
    a1_grid = np.linspace(scan["a1_min"], scan["a1_max"], scan["a1_steps"])
    a2_grid = np.linspace(scan["a2_min"], scan["a2_max"], scan["a2_steps"])
    cells = causality.hyperbolicity_region_map(a1_grid, a2_grid)
    out = _outdir(cfg, args)
    _write_csv(out / "region_map.csv", ["a1", "a2", "label", "max_abs_slope"],
               [[c.a1, c.a2, c.label, c.max_abs_slope] for c in cells])
    causal_row_ok = all(
        c.label in ("causal-strict", "causal-boundary")
        for c in cells if abs(c.a1 - 4.0) < 1e-12 and c.a2 >= 4.0)
    payload = {
        "check": "region-map",
        "parameters": {"a1_grid": list(map(float, a1_grid)),
                       "a2_grid": list(map(float, a2_grid))},
        "seed": 0,
        "tolerances": {"boundary": causality.BOUNDARY_TOL},
        "cells": len(cells),
        "a1_4_row_causal": causal_row_ok,
        "passed": causal_row_ok,
    }
    _write_json(out / "region_map.json", payload)
    print(f"region map: {len(cells)} cells; a1=4, a2>=4 row causal: {causal_row_ok}")
    return EXIT_OK if causal_row_ok else EXIT_CHECK_FAILED


def cmd_evolve(cfg, args) -> int:
    scfg = _solver_config(cfg)
    try:
        traj = solver1d.evolve(scfg)
    except SolverAbort as exc:
        print(f"solver abort: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    out = _outdir(cfg, args)
    x = np.arange(scfg.n_cells) * (scfg.length / scfg.n_cells)
    rows = []
    for t, snap in zip(traj.times, traj.snapshots):
        for j in range(scfg.n_cells):
            rows.append([t, x[j], *snap[:, j]])
    _write_csv(out / "evolve.csv", ["t", "x", "u0", "u1", "u2", "u3", "eps"], rows)
    with open(out / "evolve_diagnostics.jsonl", "w") as fh:
        for d in traj.diagnostics:
            fh.write(json.dumps({
                "t": d.t, "constraint_drift": d.constraint_drift,
                "min_eps": d.min_eps, "energy_integral": d.energy_integral,
                "min_abs_det_time_matrix": d.min_abs_det_time_matrix,
                "det_shortfall_rel": d.det_shortfall_rel,
            }) + "\n")
    print(f"evolved to t={traj.times[-1]:.6g} with dt={traj.dt:.3e}; "
          f"max constraint drift {traj.max_constraint_drift():.3e}")
    return EXIT_OK


def cmd_dod_test(cfg, args) -> int:
    scfg = _solver_config(cfg)
    d = cfg["dod"]
    base = SolverConfig(transport=scfg.transport, n_cells=scfg.n_cells,
                        length=scfg.length, cfl=scfg.cfl, t_end=d["probe_t"],
                        ic=solver1d.constant_state(eps0=cfg["solver"]["eps0"]),
                        filter_strength=0.0)
    try:
        report = experiments.dod_experiment(
            base, probe_t=d["probe_t"], probe_x=d["probe_x"],
            resolutions=tuple(d["resolutions"]), amplitude=d["amplitude"],
            radius=d["radius"], margin=d["margin"],
            probe_window=d["probe_window"], bump_power=d["bump_power"])
    except SolverAbort as exc:
        print(f"solver abort: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    out = _outdir(cfg, args)
    ok = (all(r > 8.0 for r in report.outside_ratios)
          and 3.5 <= report.outside_order <= 5.5
          and report.inside_stable
          and report.inside_limit > 1e3 * report.outside_diffs[-1]
          and report.zero_amplitude_diff == 0.0)
    payload = {
        "check": "domain-of-dependence",
        "parameters": {"a1": cfg["transport"]["a1"], "a2": cfg["transport"]["a2"],
                       "probe_t": report.probe_t, "probe_x": report.probe_x,
                       "v_max": report.v_max, "cone_radius": report.cone_radius},
        "seed": None,
        "tolerances": {"outside_ratio_min": 8.0, "outside_order": [3.5, 5.5],
                       "inside_stability": 0.1},
        "resolutions": list(report.resolutions),
        "outside_diffs": list(report.outside_diffs),
        "outside_ratios": list(report.outside_ratios),
        "outside_order": report.outside_order,
        "inside_diffs": list(report.inside_diffs),
        "inside_limit": report.inside_limit,
        "zero_amplitude_diff": report.zero_amplitude_diff,
        "passed": ok,
    }
    _write_json(out / "dod.json", payload)
    print(f"domain of dependence: outside order {report.outside_order:.2f}, "
          f"inside limit {report.inside_limit:.3e} -> {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_convergence(cfg, args) -> int:
    scfg = _solver_config(cfg)
    res = tuple(cfg["convergence"]["resolutions"])
    try:
        report = experiments.convergence_study(scfg, resolutions=res)
    except SolverAbort as exc:
        print(f"solver abort: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    out = _outdir(cfg, args)
    rows = [[name, report.errors_coarse[name], report.errors_fine[name],
             "exact" if report.orders[name] is None else report.orders[name]]
            for name in experiments.FIELD_NAMES]
    _write_csv(out / "convergence.csv",
               ["field", "coarse_error", "fine_error", "order"], rows)
    order = report.observed_order
    ok = order is None or (scfg.filter_strength == 0.0 and 3.7 <= order <= 4.3) \
        or scfg.filter_strength > 0.0
    payload = {
        "check": "self-convergence",
        "parameters": {"a1": cfg["transport"]["a1"], "a2": cfg["transport"]["a2"],
                       "filter_strength": scfg.filter_strength},
        "seed": None,
        "tolerances": {"order": [3.7, 4.3] if scfg.filter_strength == 0.0 else None},
        "resolutions": list(res),
        "orders": report.orders,
        "drift": {str(k): v for k, v in report.drift.items()},
        "passed": bool(ok),
    }
    _write_json(out / "convergence.json", payload)
    shown = "exact" if order is None else f"{order:.2f}"
    print(f"self-convergence: observed order {shown} -> {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_oracle_divergence(cfg, args) -> int:
    from .equations import SinusoidalField, divergence_residual
    model = cfg.transport_model()
    resolutions = cfg["oracle"]["resolutions"]
    t0 = cfg["oracle"]["t0"]
    fields = SinusoidalField(length=cfg["solver"]["length"])
    reports = [divergence_residual(fields, n, model, t0=t0) for n in resolutions]
    orders = [float(np.log2(a.max_discrepancy / b.max_discrepancy))
              for a, b in zip(reports, reports[1:])]
    mutated = divergence_residual(fields, resolutions[-1], model, t0=t0,
                                  mutation=("expansion_iso", 1.01))
    clean = reports[-1].max_discrepancy
    ok = (all(3.7 <= o <= 4.3 for o in orders[-2:])
          and mutated.max_discrepancy > 100.0 * clean)
    out = _outdir(cfg, args)
    _write_csv(out / "oracle_divergence.csv",
               ["resolution", "max_discrepancy", "constraint_row_max"],
               [[r.resolution, r.max_discrepancy, r.constraint_row_max]
                for r in reports])
    payload = {
        "check": "divergence-oracle",
        "parameters": {"a1": model.a1, "a2": model.a2, "t0": t0},
        "seed": None,
        "tolerances": {"order": [3.7, 4.3], "mutation_amplification_min": 100.0},
        "resolutions": list(resolutions),
        "discrepancies": [r.max_discrepancy for r in reports],
        "orders": orders,
        "mutated_discrepancy": mutated.max_discrepancy,
        "passed": bool(ok),
    }
    _write_json(out / "oracle_divergence.json", payload)
    print(f"divergence oracle: orders {['%.2f' % o for o in orders]}, "
          f"mutation amplification "
          f"{mutated.max_discrepancy / clean:.1f}x -> {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_CHECK_FAILED


COMMANDS = {
    "gevrey": cmd_gevrey,
    "verify-factorization": cmd_verify_factorization,
    "roots": cmd_roots,
    "causality-scan": cmd_causality_scan,
    "region-map": cmd_region_map,
    "evolve": cmd_evolve,
    "dod-test": cmd_dod_test,
    "convergence": cmd_convergence,
    "oracle-divergence": cmd_oracle_divergence,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vecf",
        description="Viscous conformal-fluid numerical laboratory: symbol "
                    "verification, characteristic cones, causality scans, and "
                    "a 1+1D flat-space evolution.")
    parser.add_argument("--config", help="path to an INI-style run configuration")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="SECTION.KEY=VALUE",
                        help="override one config value (repeatable)")
    parser.add_argument("--out", help="output directory (default from config)")
    parser.add_argument("--threads", type=int,
                        default=int(os.environ.get("VECF_THREADS", "1")),
                        help="worker processes for the sample suites "
                             "(default 1, or the VECF_THREADS variable)")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--samples", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        # scalar global flags are accepted after the command too
        p.add_argument("--out", default=argparse.SUPPRESS)
        p.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](cfg, args)
    except SolverAbort as exc:
        print(f"solver abort: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
