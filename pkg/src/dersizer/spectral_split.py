"""Frequency-domain decomposition of the net load into genset and BESS shares.

The sampled year is decomposed with the discrete Fourier transform; bins at
or below a cut-off frequency form the slowly varying genset share, the rest
goes to the battery. Gensets cannot absorb power, so negative samples of the
low-pass reconstruction are clamped to zero and the battery share is defined
by subtraction, which preserves the sample-wise partition of the net load.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .stochastic_models import TimeSeries


@dataclass(frozen=True)
class FrequencySpectrum:
    """Complex DFT coefficients of a real power series (unnormalized)."""

    coefficients: np.ndarray
    sample_interval_hours: float

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients, dtype=complex)
        object.__setattr__(self, "coefficients", coeffs)
        if coeffs.ndim != 1 or coeffs.size < 1:
            raise ValueError("spectrum needs a non-empty 1-D coefficient array")

    def __len__(self) -> int:
        return self.coefficients.size

    @property
    def resolution_cph(self) -> float:
        """Bin spacing in cycles/hour: 1 / (N * T)."""
        return 1.0 / (len(self) * self.sample_interval_hours)

    @property
    def frequencies_cph(self) -> np.ndarray:
        """Signed bin frequencies in cycles/hour."""
        return np.fft.fftfreq(len(self), d=self.sample_interval_hours)


@dataclass(frozen=True)
class SplitResult:
    """Sample-wise partition of a net load at a cut-off frequency.

    genset_share + bess_share_ac reconstructs the input exactly;
    genset_share is non-negative everywhere.
    """

    genset_share: TimeSeries
    bess_share_ac: TimeSeries
    cutoff_frequency_cph: float


def nyquist_frequency_cph(series: TimeSeries) -> float:
    return 0.5 / series.sample_interval_hours


def forward_transform(series: TimeSeries) -> FrequencySpectrum:
    """DFT of the sampled series (unnormalized; DC bin equals N * mean)."""
    if len(series) < 2:
        raise ValueError("need at least two samples to transform")
    return FrequencySpectrum(np.fft.fft(series.samples),
                             series.sample_interval_hours)


def inverse_transform(spectrum: FrequencySpectrum) -> TimeSeries:
    """Inverse DFT; imaginary residue of conjugate-symmetric spectra is dropped."""
    return TimeSeries(np.fft.ifft(spectrum.coefficients).real,
                      spectrum.sample_interval_hours)


def snap_cutoff_to_bin(series_length: int, sample_interval_hours: float,
                       cutoff_cph: float) -> float:
    """Quantize a continuous cut-off to the nearest DFT bin frequency."""
    resolution = 1.0 / (series_length * sample_interval_hours)
    return round(cutoff_cph / resolution) * resolution


def lowpass_split(series: TimeSeries, cutoff_cph: float,
                  spectrum: FrequencySpectrum | None = None) -> SplitResult:
    """Assign bins with |f| <= cutoff to gensets, the rest to the battery.

    The cut-off snaps to the nearest bin; the DC bin always stays on the
    genset side. The clamped genset share keeps any spectral leakage and the
    clamp residue inside the battery share by construction. Pass the
    precomputed spectrum of `series` to amortize the forward transform over
    many cut-offs.
    """
    nyquist = nyquist_frequency_cph(series)
    if not 0.0 <= cutoff_cph <= nyquist * (1 + 1e-12):
        raise ValueError(f"cutoff {cutoff_cph} outside [0, Nyquist={nyquist}]")
    if spectrum is None:
        spectrum = forward_transform(series)
    elif len(spectrum) != len(series):
        raise ValueError("precomputed spectrum length does not match series")
    snapped = snap_cutoff_to_bin(len(series), series.sample_interval_hours,
                                 min(cutoff_cph, nyquist))
    # Half-bin slack keeps boundary bins in after float rounding.
    keep = np.abs(spectrum.frequencies_cph) <= snapped + 0.5 * spectrum.resolution_cph
    keep[0] = True
    low = spectrum.coefficients * keep
    raw_genset = np.fft.ifft(low).real
    genset = np.maximum(raw_genset, 0.0)
    bess = series.samples - genset
    return SplitResult(
        genset_share=TimeSeries(genset, series.sample_interval_hours),
        bess_share_ac=TimeSeries(bess, series.sample_interval_hours),
        cutoff_frequency_cph=snapped,
    )


def write_spectrum_csv(path, spectrum: FrequencySpectrum) -> None:
    freqs = spectrum.frequencies_cph
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin", "frequency_cph", "re", "im", "magnitude"])
        for k, coeff in enumerate(spectrum.coefficients):
            writer.writerow([k, repr(float(freqs[k])), repr(coeff.real),
                             repr(coeff.imag), repr(abs(coeff))])
