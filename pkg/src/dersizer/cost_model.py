"""Levelized cost of energy, annualized technology costs, and QFD scoring."""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .stochastic_models import HOURS_PER_YEAR, TimeSeries


@dataclass(frozen=True)
class CostParameters:
    """Per-technology economic inputs.

    Fuel cost and tax credit are mutually exclusive branches: a unit either
    burns fuel (gensets) or earns a production tax credit (PV, wind).
    ``efficiency`` is the constant conversion efficiency used when no
    per-sample profile is supplied. ``energy_capital_cost`` is the $/kWh
    component for storage; zero for pure generators.
    """

    overnight_capital_cost: float  # $/kW installed
    fixed_om_cost: float           # $/kW-yr
    variable_om_cost: float        # $/kWh generated
    fuel_price: float = 0.0        # $/fuel-unit
    heat_rate: float = 0.0         # fuel-units/kWh
    leveling_factor: float = 1.0
    ptc_rate: float = 0.0          # $/kWh
    discount_rate: float = 0.05    # fraction/yr
    lifetime_years: int = 20
    is_renewable: bool = False
    is_fuel_powered: bool = False
    efficiency: float = 1.0
    energy_capital_cost: float = 0.0  # $/kWh of storage capacity

    def __post_init__(self):
        if self.discount_rate <= 0:
            raise ValueError("discount_rate must be positive")
        if self.lifetime_years < 1:
            raise ValueError("lifetime_years must be at least 1")
        for name in ("overnight_capital_cost", "fixed_om_cost",
                     "variable_om_cost", "fuel_price", "heat_rate",
                     "leveling_factor", "ptc_rate", "energy_capital_cost"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.is_renewable and self.is_fuel_powered:
            raise ValueError("is_renewable and is_fuel_powered are mutually "
                             "exclusive")
        if not 0 < self.efficiency <= 1:
            raise ValueError("efficiency must be in (0, 1]")


@dataclass(frozen=True)
class AnnualizedCost:
    """Yearly cost components; `total` is capital + O&M + fuel - tax credit."""

    capital: float
    om: float
    fuel: float = 0.0
    tax_credit: float = 0.0

    @property
    def total(self) -> float:
        return self.capital + self.om + self.fuel - self.tax_credit


def capital_recovery_factor(discount_rate: float, lifetime_years: int) -> float:
    """Level annual payment per unit of principal: r*(1+r)^y / ((1+r)^y - 1)."""
    if discount_rate <= 0:
        raise ValueError("discount_rate must be positive (formula singular "
                         "at zero)")
    if lifetime_years < 1:
        raise ValueError("lifetime_years must be at least 1")
    growth = (1.0 + discount_rate) ** lifetime_years
    return discount_rate * growth / (growth - 1.0)


def annualize_costs(params: CostParameters, rated_power_kw: float,
                    energy_profile: TimeSeries,
                    efficiency_profile: np.ndarray | None = None) -> AnnualizedCost:
    """Annualized capital, O&M, fuel, and tax-credit components of one unit.

    Fuel cost divides each sample's energy by the conversion efficiency at
    that sample before applying heat rate, fuel price, and leveling factor.
    The tax credit pays the PTC rate on every generated kWh.
    """
    if rated_power_kw <= 0:
        raise ValueError("rated_power_kw must be positive")
    power = energy_profile.samples
    if np.any(power < 0):
        raise ValueError("energy_profile must be non-negative")
    interval = energy_profile.sample_interval_hours

    if efficiency_profile is None:
        eta = params.efficiency
    else:
        eta = np.asarray(efficiency_profile, dtype=float)
        if eta.size != power.size:
            raise ValueError("efficiency_profile length does not match "
                             "energy_profile")
        if np.any(eta <= 0) or np.any(eta > 1):
            raise ValueError("efficiency samples must be in (0, 1]")

    crf = capital_recovery_factor(params.discount_rate, params.lifetime_years)
    capital = params.overnight_capital_cost * rated_power_kw * crf
    energy_kwh = float(np.sum(power) * interval)
    om = params.fixed_om_cost * rated_power_kw + params.variable_om_cost * energy_kwh

    fuel = 0.0
    if params.is_fuel_powered:
        fuel_energy = float(np.sum(power / eta) * interval)
        fuel = (params.fuel_price * fuel_energy * params.heat_rate
                * params.leveling_factor)

    tax_credit = params.ptc_rate * energy_kwh if params.is_renewable else 0.0
    return AnnualizedCost(capital=capital, om=om, fuel=fuel,
                          tax_credit=tax_credit)


def annualize_storage_costs(params: CostParameters, power_kw: float,
                            energy_kwh: float,
                            discharge_energy_kwh: float = 0.0) -> AnnualizedCost:
    """Storage variant: capital on both kW and kWh ratings, no fuel, no PTC."""
    if power_kw < 0 or energy_kwh < 0 or discharge_energy_kwh < 0:
        raise ValueError("storage ratings and throughput must be non-negative")
    crf = capital_recovery_factor(params.discount_rate, params.lifetime_years)
    capital = (params.overnight_capital_cost * power_kw
               + params.energy_capital_cost * energy_kwh) * crf
    om = (params.fixed_om_cost * power_kw
          + params.variable_om_cost * discharge_energy_kwh)
    return AnnualizedCost(capital=capital, om=om)


def realized_capacity_factor(profile: TimeSeries, rated_power_kw: float) -> float:
    """Annual energy of the profile over nameplate energy at 8760 h/yr."""
    if rated_power_kw <= 0:
        raise ValueError("rated_power_kw must be positive")
    return profile.energy_kwh() / (rated_power_kw * HOURS_PER_YEAR)


def lcoe(params: CostParameters, rated_power_kw: float, capacity_factor: float,
         annualized: AnnualizedCost) -> float:
    """Annualized total cost per kWh of annual energy output."""
    if rated_power_kw <= 0:
        raise ValueError("rated_power_kw must be positive")
    if not 0 < capacity_factor <= 1:
        raise ValueError("capacity_factor must be in (0, 1]")
    return annualized.total / (rated_power_kw * HOURS_PER_YEAR * capacity_factor)


def lcoe_vs_cf_curve(params: CostParameters, rated_power_kw: float,
                     cf_grid: list[float]) -> list[tuple[float, float]]:
    """LCOE at each capacity factor, holding the design fixed.

    Annual energy scales with CF; capital and fixed O&M stay constant while
    variable O&M, fuel, and tax credit scale linearly with energy.
    """
    if len(cf_grid) == 0:
        raise ValueError("cf_grid must not be empty")
    points = []
    for cf in cf_grid:
        if not 0 < cf <= 1:
            raise ValueError("capacity factors must be in (0, 1]")
        energy_kwh = rated_power_kw * HOURS_PER_YEAR * cf
        flat_power = TimeSeries(np.full(1, energy_kwh), 1.0)
        annualized = annualize_costs(params, rated_power_kw, flat_power)
        points.append((cf, lcoe(params, rated_power_kw, cf, annualized)))
    return points


def write_lcoe_curve_csv(path, curve: list[tuple[float, float]]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["capacity_factor", "lcoe"])
        for cf, value in curve:
            writer.writerow([repr(float(cf)), repr(float(value))])


# ---------------------------------------------------------------------------
# QFD technology scoring
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QfdMatrix:
    """Importance-weighted scoring matrix over candidate technologies."""

    criteria: tuple[tuple[str, float], ...]   # (name, importance in [1, 5])
    technologies: tuple[str, ...]
    scores: tuple[tuple[int, ...], ...]       # per technology, per criterion

    def __post_init__(self):
        if len(self.technologies) != len(self.scores):
            raise ValueError("one score row required per technology")
        for name, weight in self.criteria:
            if not 1 <= weight <= 5:
                raise ValueError(f"importance weight for '{name}' must be "
                                 "in [1, 5]")
        for tech, row in zip(self.technologies, self.scores):
            if len(row) != len(self.criteria):
                raise ValueError(f"technology '{tech}' needs exactly one "
                                 "score per criterion")


def qfd_score(matrix: QfdMatrix) -> dict[str, float]:
    """Absolute target per technology: sum of importance * score."""
    weights = np.array([w for _, w in matrix.criteria], dtype=float)
    return {
        tech: float(np.dot(weights, np.asarray(row, dtype=float)))
        for tech, row in zip(matrix.technologies, matrix.scores)
    }


DEFAULT_QFD_MATRIX = QfdMatrix(
    criteria=(
        ("LCOE", 5),
        ("CO2 Emission Reduction", 5),
        ("Fuel Consumption Savings", 4),
        ("Outage Time Reduction", 5),
        ("Dispatchability", 4),
        ("Equipment Lifetime", 3),
        ("Comply with the U.S. DOE Target", 5),
    ),
    technologies=(
        "PV Panel",
        "Wind Turbine",
        "Biomass Genset",
        "Natural Gas Genset",
        "Natural Gas Combustion Turbine",
        "Coal-Fired Power Plant",
    ),
    scores=(
        (9, 3, 9, -3, -1, 3, 9),
        (9, 3, 9, -3, -1, 3, 9),
        (3, 9, 9, 1, 1, 1, 9),
        (3, 9, 3, 3, 3, 1, 1),
        (1, 1, 1, 3, 3, 1, 1),
        (1, 0, 0, 3, 1, 3, 0),
    ),
)
