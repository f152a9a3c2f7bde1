"""Monte Carlo generation adequacy: LOLE and SAIFI versus reserve margin.

The engine draws one net-load realization per trial (load forecast error and
renewable fluctuation) and redraws unit availability per outage epoch. The
same counter-derived seeds are reused for every fleet evaluated against one
evaluator, so capacity sweeps see common random numbers: loss-of-load is then
monotone in installed capacity rather than just statistically so.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .sizing import allocate_ng_units
from .stochastic_models import (LoadModel, RenewableModel, TimeSeries,
                                generate_load, generate_renewable)

_NET_STREAM = 0
_UNIT_STREAM = 1


@dataclass(frozen=True)
class DispatchableUnit:
    rated_power_kw: float
    forced_outage_rate: float
    technology: str = "natural gas"

    def __post_init__(self):
        if self.rated_power_kw <= 0:
            raise ValueError("rated_power_kw must be positive")
        if not 0 <= self.forced_outage_rate < 1:
            raise ValueError("forced_outage_rate must be in [0, 1)")


@dataclass(frozen=True)
class ReliabilityMetrics:
    lole_days_per_year: float
    saifi_per_customer_year: float
    lole_half_width_95: float
    saifi_half_width_95: float

    def __post_init__(self):
        for name in ("lole_days_per_year", "saifi_per_customer_year",
                     "lole_half_width_95", "saifi_half_width_95"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


@dataclass
class ReliabilityConfig:
    """Fleet plus the net-load basis the fleet is evaluated against.

    Either a fixed (load_series, renewable_series) pair or stochastic
    (load_model, renewable_models, counted_fraction) may be supplied; the
    stochastic path redraws the net load every trial.
    """

    units: list[DispatchableUnit]
    trials: int
    rng_seed: int = 0
    bess_power_kw: float = 0.0
    load_series: TimeSeries | None = None
    renewable_series: TimeSeries | None = None
    load_model: LoadModel | None = None
    renewable_models: list[RenewableModel] = field(default_factory=list)
    counted_fraction: float = 1.0
    customers: int = 1000
    epoch_hours: float = 168.0
    bess_forced_outage_rate: float = 0.0
    bess_energy_kwh: float | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.customers < 1:
            raise ValueError("customers must be at least 1")
        if (self.load_series is None) == (self.load_model is None):
            raise ValueError("supply exactly one of load_series or load_model")

    @property
    def peak_load_kw(self) -> float:
        if self.load_model is not None:
            return self.load_model.peak_load_kw
        return float(self.load_series.samples.max())


def planning_capacity(peak_load_kw: float, prm: float) -> float:
    """Capacity target covering peak load plus the reserve margin fraction."""
    if peak_load_kw < 0 or prm < 0:
        raise ValueError("peak_load_kw and prm must be non-negative")
    return peak_load_kw * (1.0 + prm)


def prm_of_fleet(units: list[DispatchableUnit], bess_power_kw: float,
                 peak_load_kw: float) -> float:
    """Reserve margin implied by a fleet; negative if under-provisioned."""
    if peak_load_kw <= 0:
        raise ValueError("peak_load_kw must be positive")
    total = sum(u.rated_power_kw for u in units) + bess_power_kw
    return (total - peak_load_kw) / peak_load_kw


def plg(units: list[DispatchableUnit], p_total_kw: float) -> float:
    """Share of the largest dispatchable generator in total DER capacity."""
    if not units:
        raise ValueError("unit list must not be empty")
    if p_total_kw <= 0:
        raise ValueError("p_total_kw must be positive")
    return max(u.rated_power_kw for u in units) / p_total_kw


class AdequacyEvaluator:
    """Reusable Monte Carlo engine for one net-load basis.

    Per-trial net loads are drawn once at construction (stochastic path) and
    shared by every fleet evaluation, so repeated calls pay only for unit
    availability draws and comparisons. Stochastic horizons allocate
    trials x samples floats.
    """

    def __init__(self, *, trials: int, rng_seed: int,
                 load_series: TimeSeries | None = None,
                 renewable_series: TimeSeries | None = None,
                 load_model: LoadModel | None = None,
                 renewable_models: list[RenewableModel] | None = None,
                 counted_fraction: float = 1.0,
                 horizon: int | None = None,
                 customers: int = 1000,
                 epoch_hours: float = 168.0):
        if trials < 1:
            raise ValueError("trials must be at least 1")
        if (load_series is None) == (load_model is None):
            raise ValueError("supply exactly one of load_series or load_model")
        self.trials = trials
        self.rng_seed = rng_seed
        self.customers = customers
        self.epoch_hours = epoch_hours

        if load_model is not None:
            n = horizon if horizon is not None else load_model.base_profile.size
            interval = load_model.sample_interval_hours
            self._net_trials = np.empty((trials, n))
            for t in range(trials):
                rng = np.random.default_rng(
                    np.random.SeedSequence((rng_seed, _NET_STREAM, t)))
                net = generate_load(load_model, n, rng).samples
                for model in (renewable_models or []):
                    net = net - counted_fraction * generate_renewable(
                        model, n, rng).samples
                self._net_trials[t] = net
            self._net_fixed = None
        else:
            net = load_series.samples.copy()
            interval = load_series.sample_interval_hours
            if renewable_series is not None:
                if len(renewable_series) != len(load_series):
                    raise ValueError("renewable series length does not match "
                                     "load series")
                net = net - counted_fraction * renewable_series.samples
            n = net.size
            self._net_fixed = net
            self._net_trials = None

        self.n_samples = n
        self.sample_interval_hours = interval
        self._epoch_index = np.minimum(
            (np.arange(n) * interval / epoch_hours).astype(np.int64),
            max(int(np.ceil(n * interval / epoch_hours)) - 1, 0))
        self.n_epochs = int(self._epoch_index[-1]) + 1
        self._day_index = (np.arange(n) * interval / 24.0).astype(np.int64)
        self._n_days = int(self._day_index[-1]) + 1
        self._years_per_horizon = (n * interval) / 8760.0

    def _net(self, trial: int) -> np.ndarray:
        if self._net_fixed is not None:
            return self._net_fixed
        return self._net_trials[trial]

    def evaluate(self, units: list[DispatchableUnit], bess_power_kw: float = 0.0,
                 bess_forced_outage_rate: float = 0.0,
                 bess_energy_kwh: float | None = None) -> ReliabilityMetrics:
        """LOLE (days/yr) and SAIFI (events/customer-yr) for one fleet."""
        ratings = np.array([u.rated_power_kw for u in units])
        fors = np.array([u.forced_outage_rate for u in units])
        interval = self.sample_interval_hours
        scale = 1.0 / self._years_per_horizon  # horizon -> per-year

        lole_trials = np.empty(self.trials)
        saifi_trials = np.empty(self.trials)
        for t in range(self.trials):
            rng = np.random.default_rng(
                np.random.SeedSequence((self.rng_seed, _UNIT_STREAM, t)))
            if ratings.size:
                up = rng.random((self.n_epochs, ratings.size)) >= fors
                unit_capacity = (up @ ratings)[self._epoch_index]
            else:
                unit_capacity = np.zeros(self.n_samples)
            if bess_power_kw > 0 and bess_forced_outage_rate > 0:
                bess_up = (rng.random(self.n_epochs)
                           >= bess_forced_outage_rate)[self._epoch_index]
            else:
                bess_up = 1.0

            net = self._net(t)
            if bess_energy_kwh is None:
                shortfall = unit_capacity + bess_power_kw * bess_up < net
            else:
                shortfall = self._energy_limited_shortfall(
                    net, unit_capacity, bess_power_kw * bess_up,
                    bess_energy_kwh, interval)

            day_hit = np.zeros(self._n_days, dtype=bool)
            day_hit[self._day_index[shortfall]] = True
            lole_trials[t] = day_hit.sum() * scale
            # Contiguous shortfall samples form one interruption hitting every
            # customer on the single bus, so events/yr is already per-customer.
            events = int(shortfall[0]) + int(
                np.count_nonzero(shortfall[1:] & ~shortfall[:-1]))
            saifi_trials[t] = events * scale

        return ReliabilityMetrics(
            lole_days_per_year=float(lole_trials.mean()),
            saifi_per_customer_year=float(saifi_trials.mean()),
            lole_half_width_95=_half_width(lole_trials),
            saifi_half_width_95=_half_width(saifi_trials),
        )

    @staticmethod
    def _energy_limited_shortfall(net, unit_capacity, bess_power, bess_energy,
                                  interval) -> np.ndarray:
        """Battery rides through deficits until its energy budget is spent.

        The budget refills between deficit runs (single-bus model: any gap in
        the deficit lets the surviving units recharge the battery).
        """
        bess_power = np.broadcast_to(np.asarray(bess_power, dtype=float),
                                     net.shape)
        deficit = net - unit_capacity
        shortfall = np.zeros(net.shape, dtype=bool)
        gaps = np.flatnonzero(deficit > 0)
        if gaps.size == 0:
            return shortfall
        run_breaks = np.flatnonzero(np.diff(gaps) > 1) + 1
        for run in np.split(gaps, run_breaks):
            remaining = bess_energy
            for k in run:
                supplied = min(deficit[k], bess_power[k], remaining / interval)
                if deficit[k] - supplied > 1e-12:
                    shortfall[k] = True
                remaining -= supplied * interval
        return shortfall


def _half_width(values: np.ndarray) -> float:
    if values.size < 2:
        return 0.0
    return float(1.96 * values.std(ddof=1) / np.sqrt(values.size))


def _evaluator_from_config(config: ReliabilityConfig) -> AdequacyEvaluator:
    return AdequacyEvaluator(
        trials=config.trials, rng_seed=config.rng_seed,
        load_series=config.load_series,
        renewable_series=config.renewable_series,
        load_model=config.load_model,
        renewable_models=config.renewable_models or None,
        counted_fraction=config.counted_fraction,
        customers=config.customers, epoch_hours=config.epoch_hours)


def evaluate_reliability(config: ReliabilityConfig) -> ReliabilityMetrics:
    """Monte Carlo LOLE/SAIFI of the configured fleet against its net load."""
    evaluator = _evaluator_from_config(config)
    return evaluator.evaluate(config.units, config.bess_power_kw,
                              config.bess_forced_outage_rate,
                              config.bess_energy_kwh)


def synthesize_fleet(peak_load_kw: float, prm: float, plg_target: float,
                     forced_outage_rate: float,
                     technology: str = "natural gas") -> list[DispatchableUnit]:
    """Fleet with planning capacity peak*(1+prm) and largest share plg_target.

    The remaining capacity splits into blocks no larger than the largest
    unit, so the fleet structure depends only on plg_target and the total
    scales with prm.
    """
    if not 0 < plg_target <= 1:
        raise ValueError("plg_target must be in (0, 1]")
    total = planning_capacity(peak_load_kw, prm)
    largest = plg_target * total
    return [DispatchableUnit(r, forced_outage_rate, technology)
            for r in allocate_ng_units(total, 0.0, largest)]


def _template_for(config: ReliabilityConfig) -> float:
    return config.units[0].forced_outage_rate if config.units else 0.05


def reliability_curve(base_config: ReliabilityConfig, prm_grid: list[float],
                      plg_target: float,
                      forced_outage_rate: float | None = None,
                      ) -> list[tuple[float, ReliabilityMetrics]]:
    """Metrics per reserve-margin grid point for synthesized fleets.

    All grid points share one evaluator (common random numbers), so LOLE is
    non-increasing along an ascending grid by construction.
    """
    if any(b < a for a, b in zip(prm_grid, prm_grid[1:])):
        raise ValueError("prm_grid must be ascending")
    rate = (forced_outage_rate if forced_outage_rate is not None
            else _template_for(base_config))
    evaluator = _evaluator_from_config(base_config)
    peak = base_config.peak_load_kw
    curve = []
    for prm in prm_grid:
        fleet = synthesize_fleet(peak, prm, plg_target, rate)
        curve.append((prm, evaluator.evaluate(fleet)))
    return curve


@dataclass(frozen=True)
class PrmSearchResult:
    prm: float
    metrics: ReliabilityMetrics
    reachable: bool


def search_min_prm(evaluator: AdequacyEvaluator, peak_load_kw: float,
                   lole_threshold: float, plg_target: float,
                   forced_outage_rate: float, prm_max: float = 1.0,
                   resolution: float = 0.01) -> PrmSearchResult:
    """Smallest reserve margin whose LOLE upper bound meets the threshold.

    Bisection is sound here: shared random numbers make estimated LOLE
    non-increasing in prm for the synthesized fleet family. When even
    prm_max fails, the result carries reachable=False and the caller
    decides.
    """
    if lole_threshold <= 0:
        raise ValueError("lole_threshold must be positive")
    if resolution <= 0:
        raise ValueError("resolution must be positive")

    def probe(prm: float) -> tuple[bool, ReliabilityMetrics]:
        fleet = synthesize_fleet(peak_load_kw, prm, plg_target,
                                 forced_outage_rate)
        m = evaluator.evaluate(fleet)
        return m.lole_days_per_year + m.lole_half_width_95 <= lole_threshold, m

    ok, metrics = probe(0.0)
    if ok:
        return PrmSearchResult(0.0, metrics, True)
    ok, metrics = probe(prm_max)
    if not ok:
        return PrmSearchResult(prm_max, metrics, False)
    lo, hi, hi_metrics = 0.0, prm_max, metrics
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        ok, metrics = probe(mid)
        if ok:
            hi, hi_metrics = mid, metrics
        else:
            lo = mid
    return PrmSearchResult(hi, hi_metrics, True)


def min_prm_for_lole(base_config: ReliabilityConfig, lole_threshold: float,
                     plg_target: float, prm_max: float = 1.0,
                     resolution: float = 0.01,
                     forced_outage_rate: float | None = None,
                     ) -> PrmSearchResult:
    """search_min_prm against an evaluator built from the config."""
    rate = (forced_outage_rate if forced_outage_rate is not None
            else _template_for(base_config))
    return search_min_prm(_evaluator_from_config(base_config),
                          base_config.peak_load_kw, lole_threshold,
                          plg_target, rate, prm_max=prm_max,
                          resolution=resolution)


def write_reliability_curve_csv(path, rows: list[tuple[float, float,
                                                       ReliabilityMetrics]]):
    """Rows are (prm, plg, metrics) triples."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["prm", "plg", "lole", "lole_hw", "saifi", "saifi_hw"])
        for prm, plg_value, m in rows:
            writer.writerow([repr(float(prm)), repr(float(plg_value)),
                             repr(m.lole_days_per_year),
                             repr(m.lole_half_width_95),
                             repr(m.saifi_per_customer_year),
                             repr(m.saifi_half_width_95)])
