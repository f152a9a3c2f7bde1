"""Command-line entry point.

    dersizer <verb> --config <path> --out <dir> [--seed N] [--threads N]

Verbs: lcoe | qfd | reliability-curve | plan | sweep. Every run echoes the
effective configuration into the output directory and writes deterministic
CSV artifacts, so identical (config, seed) pairs reproduce byte-identical
results.
"""
from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from . import config as config_mod
from .config import ConfigError
from .cost_model import lcoe_vs_cf_curve, qfd_score, write_lcoe_curve_csv
from .planner import (PlanResult, SizingSolution, plan, planning_profiles,
                      sensitivity_sweep)
from .reliability import ReliabilityConfig, reliability_curve, \
    write_reliability_curve_csv
from .stochastic_models import write_series_csv

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3

VERBS = ("lcoe", "qfd", "reliability-curve", "plan", "sweep")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dersizer",
        description="Size gensets and battery storage for an islanded "
                    "community microgrid.")
    sub = parser.add_subparsers(dest="command", metavar="|".join(VERBS))
    for verb in VERBS:
        p = sub.add_parser(verb)
        p.add_argument("--config", required=True, help="YAML config file")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None,
                       help="override the master seed")
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads for the planner rounds")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def _scenario_label(fraction: float) -> str:
    if fraction == 0:
        return "No Renewables"
    return f"{round(fraction * 100):g}% Renewables"


def _write_summary_csv(path: Path, rows: list[tuple[str, SizingSolution]]):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["scenario", "annualized_cost", "genset_total_mw",
                         "bess_power_mw", "bess_energy_mwh", "largest_ng_mw"])
        for label, sol in rows:
            fleet = sol.fleet
            largest_ng = max(fleet.ng_units_kw) if fleet.ng_units_kw else 0.0
            writer.writerow([
                label,
                repr(sol.total_annualized_cost),
                repr(fleet.genset_total_nominal_kw / 1000.0),
                repr(fleet.bess_power_kw / 1000.0),
                repr(fleet.bess_energy_kwh / 1000.0),
                repr(largest_ng / 1000.0),
            ])


def _solution_document(sol: SizingSolution) -> dict:
    fleet = sol.fleet
    return {
        "feasible": bool(sol.feasible),
        "violations": list(sol.violations),
        "total_annualized_cost": float(sol.total_annualized_cost),
        "cutoff_frequency_cph": float(sol.cutoff_frequency_cph),
        "prm_used": float(sol.prm_used),
        "plg": float(sol.plg),
        "largest_ng_cap_kw": float(sol.largest_ng_cap_kw),
        "achieved_lole_days_per_year": _opt(sol.achieved_lole),
        "achieved_saifi_per_customer_year": _opt(sol.achieved_saifi),
        "lole_half_width_95": _opt(sol.lole_half_width),
        "saifi_half_width_95": _opt(sol.saifi_half_width),
        "fleet": {
            "pv_kw": float(fleet.pv_kw),
            "wt_kw": float(fleet.wt_kw),
            "biomass_kw": float(fleet.biomass_kw),
            "ng_units_kw": [float(u) for u in fleet.ng_units_kw],
            "genset_total_nominal_kw": float(fleet.genset_total_nominal_kw),
            "bess_power_kw": float(fleet.bess_power_kw),
            "bess_energy_kwh": float(fleet.bess_energy_kwh),
        },
        "cost_breakdown": {
            tech: {"capital": float(item.capital), "om": float(item.om),
                   "fuel": float(item.fuel),
                   "tax_credit": float(item.tax_credit),
                   "total": float(item.total)}
            for tech, item in sorted(sol.cost_breakdown.items())
        },
    }


def _opt(value):
    return None if value is None else float(value)


def _write_iteration_log(path: Path, result: PlanResult) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["round", "largest_ng_kw", "cutoff_frequency_cph",
                         "total_annualized_cost", "feasible", "prm_used",
                         "plg", "achieved_lole", "pso_iterations",
                         "evaluations"])
        for i, record in enumerate(result.rounds):
            sol = record.solution
            writer.writerow([
                i, repr(record.largest_ng_kw),
                repr(sol.cutoff_frequency_cph),
                repr(sol.total_annualized_cost),
                int(sol.feasible), repr(sol.prm_used), repr(sol.plg),
                repr(_opt(sol.achieved_lole)),
                record.pso_iterations, record.evaluations,
            ])


def _run_lcoe(cfg: dict, out: Path, verbose: bool) -> int:
    catalog = config_mod.build_cost_catalog(cfg)
    grid = [float(v) for v in cfg["lcoe"]["cf_grid"]]
    rated = float(cfg["lcoe"]["rated_power_kw"])
    for tech, params in sorted(catalog.items()):
        curve = lcoe_vs_cf_curve(params, rated, grid)
        write_lcoe_curve_csv(out / f"lcoe_{tech}.csv", curve)
        if verbose:
            print(f"lcoe_{tech}.csv: {len(curve)} points")
    return EXIT_OK


def _run_qfd(cfg: dict, out: Path, verbose: bool) -> int:
    matrix = config_mod.build_qfd_matrix(cfg)
    scores = qfd_score(matrix)
    with open(out / "qfd_scores.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["technology", "absolute_target"])
        for tech in matrix.technologies:
            writer.writerow([tech, repr(scores[tech])])
    if verbose:
        for tech in matrix.technologies:
            print(f"{tech}: {scores[tech]:g}")
    return EXIT_OK


def _run_reliability_curve(cfg: dict, out: Path, verbose: bool) -> int:
    settings = config_mod.build_reliability_settings(cfg)
    base = ReliabilityConfig(
        units=[], trials=settings.trials, rng_seed=int(cfg["seed"]),
        load_model=config_mod.build_load_model(cfg),
        renewable_models=config_mod.build_renewable_models(cfg),
        counted_fraction=float(cfg["planner"]["counted_renewable_fraction"]),
        customers=settings.customers, epoch_hours=settings.epoch_hours)
    prm_grid = [float(v) for v in cfg["reliability_curve"]["prm_grid"]]
    rows = []
    for plg_target in cfg["reliability_curve"]["plg_targets"]:
        curve = reliability_curve(base, prm_grid, float(plg_target),
                                  settings.ng_forced_outage_rate)
        rows.extend((prm, float(plg_target), metrics)
                    for prm, metrics in curve)
        if verbose:
            print(f"plg={plg_target}: {len(curve)} points")
    write_reliability_curve_csv(out / "reliability_curve.csv", rows)
    return EXIT_OK


def _run_plan(cfg: dict, out: Path, threads: int, verbose: bool) -> int:
    planner_config = config_mod.build_planner_config(cfg)
    result = plan(planner_config, threads=threads)
    solution = result.solution

    fraction = planner_config.counted_renewable_fraction
    _write_summary_csv(out / "plan_summary.csv",
                       [(_scenario_label(fraction), solution)])
    _write_iteration_log(out / "iteration_log.csv", result)
    with open(out / "solution.yaml", "w") as fh:
        import yaml

        yaml.safe_dump(_solution_document(solution), fh, sort_keys=True)
    load, renewables, net = planning_profiles(planner_config)
    write_series_csv(out / "planning_net_load.csv", net)
    if verbose:
        print(f"best cost {solution.total_annualized_cost:,.0f}/yr, "
              f"feasible={solution.feasible}")
    if not solution.feasible:
        print("plan infeasible: " + "; ".join(solution.violations),
              file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def _run_sweep(cfg: dict, out: Path, threads: int, verbose: bool) -> int:
    planner_config = config_mod.build_planner_config(cfg)
    fractions = [float(f) for f in cfg["sweep"]["fractions"]]
    table = sensitivity_sweep(planner_config, fractions, threads=threads)

    _write_summary_csv(out / "sweep.csv",
                       [(_scenario_label(f), sol) for f, sol in table])
    with open(out / "fig6_cost_capacity.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["counted_fraction", "annualized_cost",
                         "genset_total_mw"])
        for fraction, sol in table:
            writer.writerow([
                repr(fraction), repr(sol.total_annualized_cost),
                repr(sol.fleet.genset_total_nominal_kw / 1000.0)])
    if verbose:
        for fraction, sol in table:
            print(f"{fraction:4.0%}: cost {sol.total_annualized_cost:,.0f} "
                  f"feasible={sol.feasible}")
    if any(not sol.feasible for _, sol in table):
        print("sweep contains infeasible scenarios", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_CONFIG

    try:
        cfg = config_mod.load_config(args.config)
        if args.seed is not None:
            cfg["seed"] = int(args.seed)
        if args.threads is not None:
            cfg["planner"]["threads"] = int(args.threads)
        config_mod._validate(cfg)
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    config_mod.dump_effective_config(cfg, out / "effective_config.yaml")

    threads = int(cfg["planner"]["threads"])
    try:
        if args.command == "lcoe":
            return _run_lcoe(cfg, out, args.verbose)
        if args.command == "qfd":
            return _run_qfd(cfg, out, args.verbose)
        if args.command == "reliability-curve":
            return _run_reliability_curve(cfg, out, args.verbose)
        if args.command == "plan":
            return _run_plan(cfg, out, threads, args.verbose)
        if args.command == "sweep":
            return _run_sweep(cfg, out, threads, args.verbose)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
