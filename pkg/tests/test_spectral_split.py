"""Transform identities and the genset/BESS partition contract."""
import numpy as np
import pytest

from dersizer.spectral_split import (forward_transform, inverse_transform,
                                     lowpass_split, nyquist_frequency_cph,
                                     snap_cutoff_to_bin, write_spectrum_csv)
from dersizer.stochastic_models import TimeSeries


def random_series(n, seed, interval=1.0, loc=0.0, scale=1000.0):
    rng = np.random.default_rng(seed)
    return TimeSeries(rng.normal(loc, scale, n), interval)


class TestForwardTransform:
    def test_constant_series_is_dc_only(self):
        series = TimeSeries(np.full(48, 7.5))
        spectrum = forward_transform(series)
        assert spectrum.coefficients[0] == pytest.approx(48 * 7.5)
        assert np.all(np.abs(spectrum.coefficients[1:]) < 1e-9)

    def test_pure_sinusoid_two_conjugate_bins(self):
        n, m = 64, 5
        series = TimeSeries(np.cos(2 * np.pi * m * np.arange(n) / n))
        spectrum = forward_transform(series)
        mags = np.abs(spectrum.coefficients)
        nonzero = np.flatnonzero(mags > 1e-9)
        assert set(nonzero) == {m, n - m}
        assert spectrum.coefficients[m] == pytest.approx(
            np.conj(spectrum.coefficients[n - m]))

    def test_round_trip_identity(self):
        for n in (24, 168, 8760):
            series = random_series(n, seed=n)
            back = inverse_transform(forward_transform(series))
            scale = np.abs(series.samples).max()
            assert np.max(np.abs(back.samples - series.samples)) < 1e-9 * scale

    def test_conjugate_symmetry(self):
        series = random_series(100, seed=3)
        coeffs = forward_transform(series).coefficients
        assert np.allclose(coeffs[1:], np.conj(coeffs[1:][::-1]))

    def test_rejects_single_sample(self):
        with pytest.raises(ValueError):
            forward_transform(TimeSeries(np.array([1.0])))


class TestSnap:
    def test_snaps_to_nearest_bin(self):
        # 100 samples at 1 h: resolution 0.01 cycles/hour.
        assert snap_cutoff_to_bin(100, 1.0, 0.014) == pytest.approx(0.01)
        assert snap_cutoff_to_bin(100, 1.0, 0.016) == pytest.approx(0.02)

    def test_zero_stays_zero(self):
        assert snap_cutoff_to_bin(100, 1.0, 0.0) == 0.0


class TestLowpassSplit:
    def test_full_band_on_nonnegative_series(self):
        series = TimeSeries(np.abs(random_series(168, seed=1).samples) + 1.0)
        result = lowpass_split(series, nyquist_frequency_cph(series))
        assert np.allclose(result.genset_share.samples, series.samples,
                           atol=1e-9)
        assert np.all(np.abs(result.bess_share_ac.samples) < 1e-9)

    def test_dc_only_of_zero_mean_series(self):
        rng = np.random.default_rng(2)
        samples = rng.normal(0, 100, 128)
        samples -= samples.mean()
        series = TimeSeries(samples)
        result = lowpass_split(series, 0.0)
        assert np.all(np.abs(result.genset_share.samples) < 1e-9)
        assert np.allclose(result.bess_share_ac.samples, samples, atol=1e-9)

    def test_full_band_with_negatives_is_pointwise_clamp(self):
        series = random_series(96, seed=4, loc=0.0, scale=500.0)
        result = lowpass_split(series, nyquist_frequency_cph(series))
        assert np.allclose(result.genset_share.samples,
                           np.maximum(series.samples, 0.0), atol=1e-9)
        assert np.allclose(result.bess_share_ac.samples,
                           np.minimum(series.samples, 0.0), atol=1e-9)

    def test_partition_identity_random_cutoffs(self):
        rng = np.random.default_rng(5)
        for _ in range(25):
            n = int(rng.integers(16, 400))
            series = random_series(n, seed=int(rng.integers(1 << 30)),
                                   loc=rng.uniform(-200, 1000))
            cutoff = rng.uniform(0, nyquist_frequency_cph(series))
            result = lowpass_split(series, cutoff)
            total = result.genset_share.samples + result.bess_share_ac.samples
            scale = max(np.abs(series.samples).max(), 1.0)
            assert np.max(np.abs(total - series.samples)) <= 1e-9 * scale
            assert result.genset_share.samples.min() >= 0.0

    def test_cutoff_out_of_range(self):
        series = random_series(64, seed=6)
        with pytest.raises(ValueError):
            lowpass_split(series, -0.1)
        with pytest.raises(ValueError):
            lowpass_split(series, nyquist_frequency_cph(series) * 1.01)

    def test_precomputed_spectrum_matches(self):
        series = random_series(168, seed=7)
        spectrum = forward_transform(series)
        direct = lowpass_split(series, 0.05)
        shared = lowpass_split(series, 0.05, spectrum=spectrum)
        assert np.array_equal(direct.genset_share.samples,
                              shared.genset_share.samples)

    def test_precomputed_spectrum_length_checked(self):
        series = random_series(168, seed=8)
        with pytest.raises(ValueError):
            lowpass_split(series, 0.05,
                          spectrum=forward_transform(random_series(64, 9)))

    def test_monotone_burden_shift_on_nonnegative_series(self):
        # More bins to the gensets never raises the battery's peak burden
        # (checked pre-clamp via a series whose low-pass stays positive).
        base = 1000.0 + 200.0 * np.sin(2 * np.pi * np.arange(336) / 24.0)
        noise = np.random.default_rng(10).normal(0, 30, 336)
        series = TimeSeries(base + noise)
        resolution = 1.0 / 336
        peaks = []
        for k in (2, 5, 20, 80, 168):
            result = lowpass_split(series, k * resolution)
            peaks.append(np.abs(result.bess_share_ac.samples).max())
        assert all(b <= a + 1e-9 for a, b in zip(peaks, peaks[1:]))

    def test_parseval_on_unclamped_partition(self):
        series = random_series(256, seed=11)
        spectrum = forward_transform(series)
        n = len(series)
        keep = np.abs(spectrum.frequencies_cph) <= 0.1
        low = spectrum.coefficients * keep
        high = spectrum.coefficients * ~keep
        total = np.sum(np.abs(spectrum.coefficients) ** 2) / n
        split_sum = (np.sum(np.abs(low) ** 2) + np.sum(np.abs(high) ** 2)) / n
        energy = np.sum(series.samples ** 2)
        assert total == pytest.approx(energy, rel=1e-6)
        assert split_sum == pytest.approx(energy, rel=1e-6)

    def test_snapped_cutoff_recorded(self):
        series = random_series(100, seed=12)
        result = lowpass_split(series, 0.0149)
        assert result.cutoff_frequency_cph == pytest.approx(0.01)


class TestSpectrumCsv:
    def test_dump_columns(self, tmp_path):
        series = random_series(16, seed=13)
        path = tmp_path / "spectrum.csv"
        write_spectrum_csv(path, forward_transform(series))
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "bin,frequency_cph,re,im,magnitude"
        assert len(lines) == 17
