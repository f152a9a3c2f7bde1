"""End-to-end sizing: outer sweep over the largest natural-gas genset,
inner swarm search over the cut-off frequency, constraint screening, and
Monte Carlo reliability verification of the winning design.

The required reserve margin is not a fixed input: each candidate's largest-
unit share is mapped to the smallest margin whose LOLE meets the threshold
(a bisection against the Monte Carlo engine, cached on a quantized grid),
and sizing is iterated to a fixed point because the margin feeds back into
the capacity that defines the share.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .cost_model import (AnnualizedCost, CostParameters, annualize_costs,
                         annualize_storage_costs)
from .pso import PsoConfig, optimize
from .reliability import (AdequacyEvaluator, DispatchableUnit, PrmSearchResult,
                          ReliabilityMetrics, search_min_prm)
from .sizing import (BessParameters, FleetDesign, allocate_ng_units,
                     bess_dc_power, size_bess_energy, size_bess_power,
                     size_gensets)
from .spectral_split import (SplitResult, forward_transform, lowpass_split,
                             nyquist_frequency_cph, snap_cutoff_to_bin)
from .stochastic_models import (LoadModel, RenewableModel, TimeSeries,
                                generate_load, generate_renewable, net_load)

_PENALTY_BASE = 1e12
_SEED_LOAD = 10
_SEED_RENEWABLE = 11
_SEED_RELIABILITY = 20
_SEED_PSO = 30


@dataclass(frozen=True)
class ReliabilitySettings:
    trials: int = 1000
    epoch_hours: float = 168.0
    customers: int = 1000
    biomass_forced_outage_rate: float = 0.05
    ng_forced_outage_rate: float = 0.05
    bess_forced_outage_rate: float = 0.02
    bess_firm_capacity: bool = True
    prm_max: float = 1.0
    prm_resolution: float = 0.01
    plg_quantum: float = 0.01


@dataclass
class PlannerConfig:
    load_model: LoadModel
    renewable_models: list[RenewableModel]
    counted_renewable_fraction: float
    biomass_kw: float
    cost_catalog: dict[str, CostParameters]
    lole_threshold_days_per_year: float = 0.1
    largest_genset_step_kw: float = 100.0
    bess_params: BessParameters = field(default_factory=BessParameters)
    pso: PsoConfig = field(default_factory=lambda: PsoConfig(bounds=((0.0, 1.0),)))
    reliability: ReliabilitySettings = field(default_factory=ReliabilitySettings)
    rng_seed: int = 0
    horizon: int | None = None

    def __post_init__(self):
        if not 0 <= self.counted_renewable_fraction <= 1:
            raise ValueError("counted_renewable_fraction must be in [0, 1]")
        if self.biomass_kw < 0:
            raise ValueError("biomass_kw must be non-negative")
        if self.lole_threshold_days_per_year <= 0:
            raise ValueError("lole_threshold_days_per_year must be positive")
        if self.largest_genset_step_kw <= 0:
            raise ValueError("largest_genset_step_kw must be positive")
        for key in ("pv", "wt", "biomass", "natural_gas", "bess"):
            if key not in self.cost_catalog:
                raise ValueError(f"cost_catalog is missing technology '{key}'")


@dataclass
class SizingSolution:
    fleet: FleetDesign
    total_annualized_cost: float
    cost_breakdown: dict[str, AnnualizedCost]
    prm_used: float
    plg: float
    cutoff_frequency_cph: float
    feasible: bool
    largest_ng_cap_kw: float
    achieved_lole: float | None = None
    achieved_saifi: float | None = None
    lole_half_width: float | None = None
    saifi_half_width: float | None = None
    violations: tuple[str, ...] = ()
    violation_magnitude: float = 0.0


@dataclass
class RoundRecord:
    largest_ng_kw: float
    solution: SizingSolution
    pso_iterations: int
    evaluations: int
    best_objective: float


@dataclass
class PlanResult:
    solution: SizingSolution
    rounds: list[RoundRecord]


class AdequacyCheck(NamedTuple):
    ok: bool
    first_violation_index: int | None


def check_supply_adequacy(fleet: FleetDesign, profile: TimeSeries) -> AdequacyCheck:
    """Nominal capacity covers the planning net load at every sample."""
    capacity = fleet.genset_total_nominal_kw + fleet.bess_power_kw
    tolerance = 1e-9 * max(1.0, capacity)
    bad = np.flatnonzero(profile.samples > capacity + tolerance)
    if bad.size:
        return AdequacyCheck(False, int(bad[0]))
    return AdequacyCheck(True, None)


def planning_profiles(config: PlannerConfig) -> tuple[TimeSeries,
                                                      list[TimeSeries],
                                                      TimeSeries]:
    """The seeded planning-year draws: (load, renewables, net load)."""
    horizon = config.horizon or config.load_model.base_profile.size
    rng = np.random.default_rng(
        np.random.SeedSequence((config.rng_seed, _SEED_LOAD)))
    load = generate_load(config.load_model, horizon, rng)
    renewables = []
    for i, model in enumerate(config.renewable_models):
        rng = np.random.default_rng(
            np.random.SeedSequence((config.rng_seed, _SEED_RENEWABLE, i)))
        renewables.append(generate_renewable(model, horizon, rng))
    return load, renewables, net_load(load, renewables,
                                      config.counted_renewable_fraction)


class PlanningContext:
    """Per-plan shared state: profiles, net-load spectrum, Monte Carlo engine,
    and the quantized plg -> required-prm cache."""

    def __init__(self, config: PlannerConfig):
        self.config = config
        self.load, self.renewables, self.net = planning_profiles(config)
        self.spectrum = forward_transform(self.net)
        self.nyquist = nyquist_frequency_cph(self.net)
        # Nominal design peak, not the realized max of one noisy draw.
        self.peak_load_kw = config.load_model.peak_load_kw
        horizon = len(self.net)
        rel = config.reliability
        self.evaluator = AdequacyEvaluator(
            trials=rel.trials,
            rng_seed=_derive_seed(config.rng_seed, _SEED_RELIABILITY),
            load_model=config.load_model,
            renewable_models=config.renewable_models,
            counted_fraction=config.counted_renewable_fraction,
            horizon=horizon,
            customers=rel.customers,
            epoch_hours=rel.epoch_hours)
        self._prm_cache: dict[int, PrmSearchResult] = {}
        self._candidate_cache: dict[tuple[float, float], SizingSolution] = {}
        # Aggregate renewable profiles per technology for the cost model.
        self.tech_profiles: dict[str, tuple[float, TimeSeries]] = {}
        for tech in ("pv", "wt"):
            rated = sum(m.rated_power_kw for m in config.renewable_models
                        if m.technology == tech)
            series = [s for m, s in zip(config.renewable_models,
                                        self.renewables)
                      if m.technology == tech]
            if rated > 0 and series:
                total = np.sum([s.samples for s in series], axis=0)
                self.tech_profiles[tech] = (
                    rated, TimeSeries(total, self.net.sample_interval_hours))

    def required_prm(self, plg_value: float) -> PrmSearchResult:
        """Smallest margin meeting the LOLE threshold at this largest-unit
        share, quantized upward (conservative) and cached."""
        rel = self.config.reliability
        quantum = rel.plg_quantum
        key = max(1, math.ceil(plg_value / quantum - 1e-12))
        cached = self._prm_cache.get(key)
        if cached is None:
            cached = search_min_prm(
                self.evaluator, self.peak_load_kw,
                self.config.lole_threshold_days_per_year,
                min(key * quantum, 1.0), rel.ng_forced_outage_rate,
                prm_max=rel.prm_max, resolution=rel.prm_resolution)
            self._prm_cache[key] = cached
        return cached

    def split(self, cutoff_cph: float) -> SplitResult:
        return lowpass_split(self.net, cutoff_cph, spectrum=self.spectrum)

    def fleet_units(self, fleet: FleetDesign) -> list[DispatchableUnit]:
        rel = self.config.reliability
        units = []
        if fleet.biomass_kw > 0:
            units.append(DispatchableUnit(fleet.biomass_kw,
                                          rel.biomass_forced_outage_rate,
                                          "biomass"))
        units.extend(DispatchableUnit(r, rel.ng_forced_outage_rate,
                                      "natural gas")
                     for r in fleet.ng_units_kw)
        return units

    def verify_fleet(self, fleet: FleetDesign) -> ReliabilityMetrics:
        rel = self.config.reliability
        bess_for = 0.0 if rel.bess_firm_capacity else rel.bess_forced_outage_rate
        return self.evaluator.evaluate(self.fleet_units(fleet),
                                       fleet.bess_power_kw, bess_for)


def _derive_seed(master: int, *path: int) -> int:
    return int(np.random.SeedSequence((master, *path)).generate_state(1)[0])


def evaluate_candidate(cutoff_cph: float, largest_ng_kw: float,
                       config: PlannerConfig,
                       verify_reliability: bool = True,
                       context: PlanningContext | None = None) -> SizingSolution:
    """Size, cost, and screen one (cut-off, largest-genset) candidate.

    With verify_reliability the achieved LOLE/SAIFI come from the Monte
    Carlo engine on the actual unit list, and the margin is escalated in
    resolution steps if the verified LOLE misses the threshold that the
    synthesized-fleet search promised.
    """
    if context is None:
        context = PlanningContext(config)
    return _evaluate(context, cutoff_cph, largest_ng_kw, verify_reliability)


def _sized_fleet(context: PlanningContext, split: SplitResult,
                 largest_ng_kw: float, prm: float,
                 bess_power: float, bess_energy: float) -> FleetDesign:
    config = context.config
    genset_total = max(size_gensets(split.genset_share, prm), config.biomass_kw)
    ng_units = allocate_ng_units(genset_total, config.biomass_kw, largest_ng_kw)
    rated = {tech: context.tech_profiles.get(tech, (0.0, None))[0]
             for tech in ("pv", "wt")}
    return FleetDesign(
        pv_kw=rated["pv"], wt_kw=rated["wt"], biomass_kw=config.biomass_kw,
        ng_units_kw=tuple(ng_units), genset_total_nominal_kw=genset_total,
        bess_power_kw=bess_power, bess_energy_kwh=bess_energy)


def _evaluate(context: PlanningContext, cutoff_cph: float,
              largest_ng_kw: float, verify: bool) -> SizingSolution:
    config = context.config
    rel = config.reliability
    split = context.split(cutoff_cph)
    if not verify:
        key = (largest_ng_kw, split.cutoff_frequency_cph)
        cached = context._candidate_cache.get(key)
        if cached is not None:
            return cached

    dc = bess_dc_power(split.bess_share_ac,
                       config.bess_params.conversion_efficiency)
    bess_power = size_bess_power(dc)
    bess_energy = size_bess_energy(dc, config.bess_params)

    # Fixed point between the reserve margin and the largest-unit share it
    # implies; quantization of the share makes this terminate.
    prm = 0.0
    search: PrmSearchResult | None = None
    visited_prms = []
    for _ in range(8):
        fleet = _sized_fleet(context, split, largest_ng_kw, prm,
                             bess_power, bess_energy)
        plg_value = fleet.largest_dispatchable_kw / fleet.dispatchable_total_kw
        search = context.required_prm(plg_value)
        visited_prms.append(search.prm)
        if search.prm == prm:
            break
        prm = search.prm
    else:
        prm = max(visited_prms)
        fleet = _sized_fleet(context, split, largest_ng_kw, prm,
                             bess_power, bess_energy)
        plg_value = fleet.largest_dispatchable_kw / fleet.dispatchable_total_kw

    violations: list[str] = []
    magnitude = 0.0
    threshold = config.lole_threshold_days_per_year
    if not search.reachable:
        violations.append("lole threshold unreachable at this unit share")
        magnitude += (search.metrics.lole_days_per_year - threshold) / threshold

    achieved = None
    if verify:
        achieved = context.verify_fleet(fleet)
        escalations = 0
        while (achieved.lole_days_per_year > threshold
               and prm < rel.prm_max and escalations < 20):
            prm = min(prm + rel.prm_resolution, rel.prm_max)
            fleet = _sized_fleet(context, split, largest_ng_kw, prm,
                                 bess_power, bess_energy)
            achieved = context.verify_fleet(fleet)
            escalations += 1
        plg_value = fleet.largest_dispatchable_kw / fleet.dispatchable_total_kw
        if achieved.lole_days_per_year > threshold:
            violations.append("verified lole exceeds threshold")
            magnitude += (achieved.lole_days_per_year - threshold) / threshold

    if plg_value > prm + 1e-12:
        violations.append("largest-unit share exceeds reserve margin")
        magnitude += plg_value - prm

    adequacy = check_supply_adequacy(fleet, context.net)
    if not adequacy.ok:
        shortfall = (context.net.samples[adequacy.first_violation_index]
                     - fleet.genset_total_nominal_kw - fleet.bess_power_kw)
        violations.append("supply below planning net load")
        magnitude += shortfall / max(context.peak_load_kw, 1.0)

    breakdown = _cost_breakdown(context, split, fleet)
    total = sum(item.total for item in breakdown.values())

    solution = SizingSolution(
        fleet=fleet, total_annualized_cost=total, cost_breakdown=breakdown,
        prm_used=prm, plg=plg_value,
        cutoff_frequency_cph=split.cutoff_frequency_cph,
        feasible=not violations, largest_ng_cap_kw=largest_ng_kw,
        achieved_lole=achieved.lole_days_per_year if achieved else None,
        achieved_saifi=achieved.saifi_per_customer_year if achieved else None,
        lole_half_width=achieved.lole_half_width_95 if achieved else None,
        saifi_half_width=achieved.saifi_half_width_95 if achieved else None,
        violations=tuple(violations), violation_magnitude=magnitude)
    if not verify:
        context._candidate_cache[(largest_ng_kw,
                                  split.cutoff_frequency_cph)] = solution
    return solution


def _cost_breakdown(context: PlanningContext, split: SplitResult,
                    fleet: FleetDesign) -> dict[str, AnnualizedCost]:
    config = context.config
    catalog = config.cost_catalog
    interval = context.net.sample_interval_hours
    zero = AnnualizedCost(0.0, 0.0)
    breakdown: dict[str, AnnualizedCost] = {}

    for tech in ("pv", "wt"):
        entry = context.tech_profiles.get(tech)
        breakdown[tech] = (annualize_costs(catalog[tech], entry[0], entry[1])
                           if entry else zero)

    # Genset energy split: the biomass unit runs first, natural gas covers
    # the rest of the low-frequency share.
    share = split.genset_share.samples
    biomass_power = np.minimum(share, fleet.biomass_kw)
    ng_power = share - biomass_power
    breakdown["biomass"] = (
        annualize_costs(catalog["biomass"], fleet.biomass_kw,
                        TimeSeries(biomass_power, interval))
        if fleet.biomass_kw > 0 else zero)
    ng_total = float(sum(fleet.ng_units_kw))
    breakdown["natural_gas"] = (
        annualize_costs(catalog["natural_gas"], ng_total,
                        TimeSeries(ng_power, interval))
        if ng_total > 0 else zero)

    discharge_kwh = float(
        np.sum(np.maximum(split.bess_share_ac.samples, 0.0)) * interval)
    breakdown["bess"] = annualize_storage_costs(
        catalog["bess"], fleet.bess_power_kw, fleet.bess_energy_kwh,
        discharge_kwh)
    return breakdown


def _round_largest_values(peak_load_kw: float, biomass_kw: float,
                          step_kw: float) -> list[float]:
    start = peak_load_kw - biomass_kw
    if start < biomass_kw or biomass_kw <= 0:
        return [max(start, biomass_kw, step_kw)]
    values = []
    current = start
    while current >= biomass_kw - 1e-9:
        values.append(current)
        current -= step_kw
    return values


def _solution_rank(solution: SizingSolution) -> tuple:
    return (solution.total_annualized_cost,
            solution.fleet.genset_total_nominal_kw,
            solution.fleet.bess_energy_kwh)


def plan(config: PlannerConfig, threads: int = 1) -> PlanResult:
    """Search every largest-genset round for the cost-minimal feasible design.

    Returns the best verified-feasible solution, or the least-violating
    candidate flagged infeasible when nothing passes. Rounds are independent
    given derived seeds, so they may run on multiple threads; aggregation is
    in round order either way.
    """
    context = PlanningContext(config)
    rounds_largest = _round_largest_values(context.peak_load_kw,
                                           config.biomass_kw,
                                           config.largest_genset_step_kw)

    def run_round(index: int) -> RoundRecord:
        largest = rounds_largest[index]
        evaluations = 0

        def objective(position: np.ndarray) -> float:
            nonlocal evaluations
            evaluations += 1
            candidate = _evaluate(context, float(position[0]), largest,
                                  verify=False)
            if candidate.feasible:
                return candidate.total_annualized_cost
            return _PENALTY_BASE + candidate.violation_magnitude

        pso_config = replace(config.pso,
                             bounds=((0.0, context.nyquist),),
                             rng_seed=_derive_seed(config.rng_seed,
                                                   _SEED_PSO, index))
        result = optimize(objective, pso_config)

        # Polish: the objective is piecewise constant in the cut-off bin, so
        # check the neighboring bin edges of the swarm's best.
        resolution = context.spectrum.resolution_cph
        best_cutoff = float(result.best_position[0])
        best_objective = result.best_objective
        snapped = snap_cutoff_to_bin(len(context.net),
                                     context.net.sample_interval_hours,
                                     best_cutoff)
        for offset in (-3, -2, -1, 1, 2, 3):
            probe = snapped + offset * resolution
            if not 0.0 <= probe <= context.nyquist:
                continue
            value = objective(np.array([probe]))
            if value < best_objective:
                best_objective, best_cutoff = value, probe

        solution = _evaluate(context, best_cutoff, largest, verify=True)
        return RoundRecord(largest_ng_kw=largest, solution=solution,
                           pso_iterations=result.iterations_run,
                           evaluations=evaluations,
                           best_objective=best_objective)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(run_round, range(len(rounds_largest))))
    else:
        records = [run_round(i) for i in range(len(rounds_largest))]

    feasible = [r.solution for r in records if r.solution.feasible]
    if feasible:
        best = min(feasible, key=_solution_rank)
    else:
        best = min((r.solution for r in records),
                   key=lambda s: (s.violation_magnitude, *_solution_rank(s)))
    return PlanResult(solution=best, rounds=records)


def sensitivity_sweep(config: PlannerConfig, fractions: list[float],
                      threads: int = 1) -> list[tuple[float, SizingSolution]]:
    """plan() per counted renewable fraction with shared seeds."""
    if any(b < a for a, b in zip(fractions, fractions[1:])):
        raise ValueError("fractions must be ascending")
    table = []
    for fraction in fractions:
        scenario = replace(config, counted_renewable_fraction=fraction)
        table.append((fraction, plan(scenario, threads=threads).solution))
    return table
