"""Nominal genset, BESS power, and BESS energy capacities from a load split."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .stochastic_models import TimeSeries


@dataclass(frozen=True)
class BessParameters:
    """Converter efficiency and usable state-of-charge window."""

    conversion_efficiency: float = 0.95
    soc_max: float = 0.9
    soc_min: float = 0.1
    initial_energy_offset_kwh: float = 0.0

    def __post_init__(self):
        if not 0 < self.conversion_efficiency <= 1:
            raise ValueError("conversion_efficiency must be in (0, 1]")
        if not 0 <= self.soc_min < self.soc_max <= 1:
            raise ValueError("need 0 <= soc_min < soc_max <= 1")


@dataclass(frozen=True)
class FleetDesign:
    """Capacities of every DER in the microgrid."""

    pv_kw: float
    wt_kw: float
    biomass_kw: float
    ng_units_kw: tuple[float, ...]
    genset_total_nominal_kw: float
    bess_power_kw: float
    bess_energy_kwh: float

    def __post_init__(self):
        for name in ("pv_kw", "wt_kw", "biomass_kw",
                     "genset_total_nominal_kw", "bess_power_kw",
                     "bess_energy_kwh"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        ng_sum = float(sum(self.ng_units_kw))
        if not np.isclose(self.biomass_kw + ng_sum,
                          self.genset_total_nominal_kw, rtol=1e-6, atol=1e-6):
            raise ValueError("genset_total_nominal_kw must equal biomass plus "
                             "natural-gas unit ratings")

    @property
    def largest_dispatchable_kw(self) -> float:
        return max((self.biomass_kw, *self.ng_units_kw))

    @property
    def dispatchable_total_kw(self) -> float:
        """Total dispatchable capacity including BESS power rating."""
        return self.genset_total_nominal_kw + self.bess_power_kw


def size_gensets(genset_share: TimeSeries, prm: float) -> float:
    """Peak of the genset share plus planning reserve headroom."""
    if prm < 0:
        raise ValueError("prm must be non-negative")
    share = genset_share.samples
    if np.any(share < 0):
        raise ValueError("genset share must be non-negative (clamp upstream)")
    return float(share.max() * (1.0 + prm))


def bess_dc_power(bess_ac: TimeSeries, conversion_efficiency: float) -> TimeSeries:
    """AC share mapped to the DC side of the converter.

    Discharging samples (>= 0) grow by 1/eta; charging samples shrink by eta.
    """
    eta = conversion_efficiency
    if not 0 < eta <= 1:
        raise ValueError("conversion_efficiency must be in (0, 1]")
    ac = bess_ac.samples
    dc = np.where(ac >= 0, ac / eta, ac * eta)
    return TimeSeries(dc, bess_ac.sample_interval_hours)


def size_bess_power(bess_dc: TimeSeries) -> float:
    """Maximum absolute DC power over the horizon."""
    return float(np.abs(bess_dc.samples).max())


def stored_energy_trajectory(bess_dc: TimeSeries,
                             initial_energy_offset_kwh: float = 0.0) -> np.ndarray:
    """Running sum of DC energy flows, E[i] = sum_{k<=i} P_dc[k] * T."""
    return (np.cumsum(bess_dc.samples) * bess_dc.sample_interval_hours
            + initial_energy_offset_kwh)


def size_bess_energy(bess_dc: TimeSeries, params: BessParameters) -> float:
    """Energy swing of the cumulative trajectory over the usable SOC window."""
    trajectory = stored_energy_trajectory(bess_dc,
                                          params.initial_energy_offset_kwh)
    swing = float(trajectory.max() - trajectory.min())
    return swing / (params.soc_max - params.soc_min)


def allocate_ng_units(genset_total_kw: float, biomass_kw: float,
                      largest_ng_kw: float) -> list[float]:
    """Split the natural-gas block into units no larger than largest_ng_kw.

    Full units at the cap, then one remainder unit. A cap above the block
    size yields a single unit at the block size.
    """
    if largest_ng_kw <= 0:
        raise ValueError("largest_ng_kw must be positive")
    block = genset_total_kw - biomass_kw
    if block < -1e-9 * max(1.0, genset_total_kw):
        raise ValueError("biomass capacity exceeds genset total")
    block = max(block, 0.0)
    if block == 0.0:
        return []
    n_full = int(np.floor(block / largest_ng_kw + 1e-12))
    remainder = block - n_full * largest_ng_kw
    units = [largest_ng_kw] * n_full
    if remainder > 1e-9 * max(1.0, block):
        units.append(remainder)
    return units
