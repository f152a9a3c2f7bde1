"""Synthetic load and renewable power profiles with seeded uncertainty.

Everything downstream (spectral split, sizing, reliability) consumes the
``TimeSeries`` container defined here. Generators are deterministic given
their seed, so whole planning runs replay bit-identically.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

HOURS_PER_YEAR = 8760


def _rng(seed) -> np.random.Generator:
    """Seeded generator; accepts ints or int sequences for derived streams."""
    return np.random.default_rng(np.random.SeedSequence(seed))


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled power profile in kW.

    ``samples`` may be negative (net load after renewable subtraction);
    generators enforce non-negativity where it applies.
    """

    samples: np.ndarray
    sample_interval_hours: float = 1.0

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=float)
        object.__setattr__(self, "samples", arr)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("TimeSeries needs a non-empty 1-D sample array")
        if not np.all(np.isfinite(arr)):
            raise ValueError("TimeSeries samples must be finite")
        if self.sample_interval_hours <= 0:
            raise ValueError("sample_interval_hours must be positive")

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration_hours(self) -> float:
        return self.samples.size * self.sample_interval_hours

    def energy_kwh(self) -> float:
        """Signed energy of the profile (sum of P[i]*T)."""
        return float(np.sum(self.samples) * self.sample_interval_hours)


@dataclass(frozen=True)
class LoadModel:
    """Deterministic base shape plus multiplicative Gaussian forecast error."""

    base_profile: np.ndarray
    peak_load_kw: float
    noise_std_fraction: float = 0.0
    rng_seed: int = 0
    sample_interval_hours: float = 1.0

    def __post_init__(self):
        profile = np.asarray(self.base_profile, dtype=float)
        object.__setattr__(self, "base_profile", profile)
        if profile.size < 1 or np.any(profile < 0):
            raise ValueError("base_profile must be non-empty and non-negative")
        if not np.isclose(profile.max(), self.peak_load_kw, rtol=1e-6):
            raise ValueError("peak of base_profile must equal peak_load_kw")
        if not 0.0 <= self.noise_std_fraction <= 0.5:
            raise ValueError("noise_std_fraction must be in [0, 0.5]")

    @classmethod
    def from_shape(cls, shape: np.ndarray, peak_load_kw: float, **kwargs) -> "LoadModel":
        """Rescale an arbitrary non-negative shape so its peak hits peak_load_kw."""
        shape = np.asarray(shape, dtype=float)
        if shape.max() <= 0:
            raise ValueError("shape must have a positive peak")
        return cls(base_profile=shape * (peak_load_kw / shape.max()),
                   peak_load_kw=peak_load_kw, **kwargs)


@dataclass(frozen=True)
class PvVariability:
    """Beta-distributed per-sample cloud attenuation factor in [0, 1]."""

    alpha: float = 4.0
    beta: float = 1.3

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("Beta distribution parameters must be positive")


@dataclass(frozen=True)
class WindVariability:
    """Weibull wind speed pushed through a cut-in/rated/cut-out power curve."""

    weibull_scale_ms: float = 7.5
    weibull_shape: float = 2.0
    cut_in_ms: float = 3.0
    rated_ms: float = 12.0
    cut_out_ms: float = 25.0

    def __post_init__(self):
        if self.weibull_scale_ms <= 0 or self.weibull_shape <= 0:
            raise ValueError("Weibull parameters must be positive")
        if not 0 <= self.cut_in_ms < self.rated_ms < self.cut_out_ms:
            raise ValueError("need cut_in < rated < cut_out, all non-negative")

    def power_fraction(self, speed_ms: np.ndarray) -> np.ndarray:
        """Normalized turbine output: cubic ramp between cut-in and rated."""
        v = np.asarray(speed_ms, dtype=float)
        frac = np.zeros_like(v)
        ramp = (v >= self.cut_in_ms) & (v < self.rated_ms)
        frac[ramp] = ((v[ramp] - self.cut_in_ms) / (self.rated_ms - self.cut_in_ms)) ** 3
        frac[(v >= self.rated_ms) & (v <= self.cut_out_ms)] = 1.0
        return frac


@dataclass(frozen=True)
class RenewableModel:
    """PV or wind unit: deterministic availability shape times random attenuation."""

    technology: str  # "pv" | "wt"
    rated_power_kw: float
    shape: np.ndarray
    variability: PvVariability | WindVariability | None = None
    rng_seed: int = 0
    sample_interval_hours: float = 1.0

    def __post_init__(self):
        if self.technology not in ("pv", "wt"):
            raise ValueError("technology must be 'pv' or 'wt'")
        if self.rated_power_kw < 0:
            raise ValueError("rated_power_kw must be non-negative")
        shape = np.asarray(self.shape, dtype=float)
        object.__setattr__(self, "shape", shape)
        if shape.size < 1 or np.any(shape < 0) or np.any(shape > 1):
            raise ValueError("shape must lie in [0, 1]")
        if self.variability is not None:
            want = PvVariability if self.technology == "pv" else WindVariability
            if not isinstance(self.variability, want):
                raise ValueError(f"variability type does not match technology "
                                 f"'{self.technology}'")


def _tile_profile(profile: np.ndarray, horizon: int, what: str) -> np.ndarray:
    if horizon % profile.size != 0:
        raise ValueError(f"horizon {horizon} is not a multiple of the "
                         f"{what} period {profile.size}")
    return np.tile(profile, horizon // profile.size)


def generate_load(model: LoadModel, horizon: int,
                  rng: np.random.Generator | None = None) -> TimeSeries:
    """Draw one load realization: base * max(0, 1 + eps), eps ~ N(0, sigma^2)."""
    base = _tile_profile(model.base_profile, horizon, "load profile")
    if rng is None:
        rng = _rng(model.rng_seed)
    if model.noise_std_fraction > 0:
        eps = rng.normal(0.0, model.noise_std_fraction, size=horizon)
        samples = base * np.maximum(0.0, 1.0 + eps)
    else:
        samples = base.copy()
    return TimeSeries(samples, model.sample_interval_hours)


def generate_renewable(model: RenewableModel, horizon: int,
                       rng: np.random.Generator | None = None) -> TimeSeries:
    """Draw one renewable realization, clamped to [0, rated_power_kw]."""
    shape = _tile_profile(model.shape, horizon, "availability shape")
    if rng is None:
        rng = _rng(model.rng_seed)
    if model.variability is None:
        attenuation = 1.0
    elif isinstance(model.variability, PvVariability):
        attenuation = rng.beta(model.variability.alpha, model.variability.beta,
                               size=horizon)
    else:
        speeds = model.variability.weibull_scale_ms * rng.weibull(
            model.variability.weibull_shape, size=horizon)
        attenuation = model.variability.power_fraction(speeds)
    samples = np.clip(model.rated_power_kw * shape * attenuation,
                      0.0, model.rated_power_kw)
    return TimeSeries(samples, model.sample_interval_hours)


def net_load(load: TimeSeries, renewables: list[TimeSeries],
             counted_fraction: float) -> TimeSeries:
    """Load minus the counted portion of renewable generation (may go negative)."""
    if not 0.0 <= counted_fraction <= 1.0:
        raise ValueError("counted_fraction must be in [0, 1]")
    total_re = np.zeros(len(load))
    for series in renewables:
        if len(series) != len(load):
            raise ValueError("renewable series length does not match load")
        if not np.isclose(series.sample_interval_hours,
                          load.sample_interval_hours):
            raise ValueError("renewable sampling interval does not match load")
        total_re += series.samples
    return TimeSeries(load.samples - counted_fraction * total_re,
                      load.sample_interval_hours)


# ---------------------------------------------------------------------------
# Default synthetic shapes (stand-ins for unpublished utility datasets)
# ---------------------------------------------------------------------------

def community_load_shape(hours: int = HOURS_PER_YEAR,
                         sample_interval_hours: float = 1.0) -> np.ndarray:
    """Daily double-peak community demand with weekly and seasonal modulation.

    The dominant peak sits in the early afternoon so midday PV can shave it;
    a secondary evening shoulder keeps some demand outside solar hours.
    Normalized so the maximum over the horizon is 1.
    """
    t = np.arange(hours) * sample_interval_hours
    hour_of_day = t % 24.0
    day = np.floor(t / 24.0)
    afternoon = 0.55 * np.exp(-0.5 * ((hour_of_day - 14.0) / 3.2) ** 2)
    evening = 0.30 * np.exp(-0.5 * ((hour_of_day - 19.5) / 2.0) ** 2)
    daily = 0.42 + afternoon + evening
    weekly = np.where((day % 7) >= 5, 0.88, 1.0)
    seasonal = 1.0 + 0.15 * np.cos(2 * np.pi * (day - 200.0) / 365.0)
    shape = daily * weekly * seasonal
    return shape / shape.max()


def clear_sky_shape(hours: int = HOURS_PER_YEAR,
                    sample_interval_hours: float = 1.0) -> np.ndarray:
    """Solar availability: seasonal daylight window with a sine elevation arc."""
    t = np.arange(hours) * sample_interval_hours
    hour_of_day = t % 24.0
    day = np.floor(t / 24.0)
    daylight = 12.0 + 3.0 * np.sin(2 * np.pi * (day - 80.0) / 365.0)
    sunrise = 12.0 - daylight / 2.0
    elevation = np.sin(np.pi * (hour_of_day - sunrise) / daylight)
    up = (hour_of_day > sunrise) & (hour_of_day < sunrise + daylight)
    amplitude = 0.78 + 0.22 * np.sin(2 * np.pi * (day - 80.0) / 365.0)
    return np.clip(np.where(up, amplitude * elevation, 0.0), 0.0, 1.0)


def steady_wind_shape(hours: int = HOURS_PER_YEAR,
                      sample_interval_hours: float = 1.0) -> np.ndarray:
    """Mild winter-favoring seasonal modulation of wind resource, in [0.6, 1]."""
    t = np.arange(hours) * sample_interval_hours
    day = np.floor(t / 24.0)
    return 0.8 + 0.2 * np.cos(2 * np.pi * (day - 20.0) / 365.0)


# ---------------------------------------------------------------------------
# CSV ingestion / export
# ---------------------------------------------------------------------------

CSV_HEADER = ["timestamp", "power_kw"]


def read_series_csv(path) -> TimeSeries:
    """Read `timestamp,power_kw` rows; timestamps are hours, spacing uniform."""
    stamps, powers = [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != CSV_HEADER:
            raise ValueError(f"{path}: expected header '{','.join(CSV_HEADER)}'")
        for row in reader:
            if not row:
                continue
            stamps.append(float(row[0]))
            powers.append(float(row[1]))
    if len(powers) < 1:
        raise ValueError(f"{path}: no samples")
    if len(powers) == 1:
        return TimeSeries(np.asarray(powers))
    steps = np.diff(np.asarray(stamps))
    if not np.allclose(steps, steps[0], rtol=1e-9, atol=1e-9) or steps[0] <= 0:
        raise ValueError(f"{path}: timestamps must be uniformly spaced")
    return TimeSeries(np.asarray(powers), float(steps[0]))


def write_series_csv(path, series: TimeSeries) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for i, value in enumerate(series.samples):
            writer.writerow([repr(i * series.sample_interval_hours),
                             repr(float(value))])
