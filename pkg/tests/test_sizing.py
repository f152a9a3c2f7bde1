"""Genset/BESS sizing rules against brute-force oracles."""
import numpy as np
import pytest

from dersizer.sizing import (BessParameters, FleetDesign, allocate_ng_units,
                             bess_dc_power, size_bess_energy, size_bess_power,
                             size_gensets, stored_energy_trajectory)
from dersizer.stochastic_models import TimeSeries


def brute_force_bess_energy(samples, interval, soc_max, soc_min):
    """Independent running-sum oracle for the nominal energy capacity."""
    running = 0.0
    trajectory = []
    for p in samples:
        running += p * interval
        trajectory.append(running)
    return (max(trajectory) - min(trajectory)) / (soc_max - soc_min)


class TestSizeGensets:
    def test_constant_share_with_margin(self):
        share = TimeSeries(np.full(24, 1000.0))
        assert size_gensets(share, 0.2) == pytest.approx(1200.0)

    def test_zero_margin_is_peak(self):
        share = TimeSeries(np.array([10.0, 60.0, 30.0]))
        assert size_gensets(share, 0.0) == pytest.approx(60.0)

    def test_negative_share_rejected(self):
        with pytest.raises(ValueError):
            size_gensets(TimeSeries(np.array([5.0, -1.0])), 0.1)

    def test_negative_prm_rejected(self):
        with pytest.raises(ValueError):
            size_gensets(TimeSeries(np.ones(3)), -0.1)


class TestBessDcPower:
    def test_unity_efficiency_identity(self):
        series = TimeSeries(np.array([100.0, -50.0, 0.0]))
        out = bess_dc_power(series, 1.0)
        assert np.array_equal(out.samples, series.samples)

    def test_discharge_divided_by_eta(self):
        out = bess_dc_power(TimeSeries(np.array([100.0])), 0.9)
        assert out.samples[0] == pytest.approx(100.0 / 0.9)

    def test_charge_multiplied_by_eta(self):
        out = bess_dc_power(TimeSeries(np.array([-100.0])), 0.9)
        assert out.samples[0] == pytest.approx(-90.0)

    def test_eta_out_of_range(self):
        with pytest.raises(ValueError):
            bess_dc_power(TimeSeries(np.ones(2)), 0.0)
        with pytest.raises(ValueError):
            bess_dc_power(TimeSeries(np.ones(2)), 1.1)


class TestSizeBessPower:
    def test_all_zero(self):
        assert size_bess_power(TimeSeries(np.zeros(10))) == 0.0

    def test_absolute_max(self):
        assert size_bess_power(TimeSeries(np.array([50.0, -80.0]))) == 80.0

    def test_matches_brute_force_scan(self):
        rng = np.random.default_rng(1)
        samples = rng.normal(0, 200, 500)
        series = TimeSeries(samples)
        assert size_bess_power(series) == max(abs(p) for p in samples)


class TestSizeBessEnergy:
    def test_all_zero(self):
        params = BessParameters(soc_max=0.8, soc_min=0.2)
        assert size_bess_energy(TimeSeries(np.zeros(10)), params) == 0.0

    def test_square_wave_hand_case(self):
        # +100 kW for 2 h then -100 kW for 2 h over a [0.2, 0.8] SOC window.
        series = TimeSeries(np.array([100.0, 100.0, -100.0, -100.0]), 1.0)
        params = BessParameters(conversion_efficiency=1.0, soc_max=0.8,
                                soc_min=0.2)
        assert size_bess_energy(series, params) == pytest.approx(
            333.3333333333, abs=1e-6)

    def test_matches_brute_force_on_random_series(self):
        rng = np.random.default_rng(2)
        params = BessParameters(soc_max=0.9, soc_min=0.1)
        for _ in range(50):
            n = int(rng.integers(2, 200))
            interval = float(rng.choice([0.25, 0.5, 1.0]))
            samples = rng.normal(0, 300, n)
            series = TimeSeries(samples, interval)
            expected = brute_force_bess_energy(samples, interval, 0.9, 0.1)
            assert size_bess_energy(series, params) == expected

    def test_offset_invariance(self):
        series = TimeSeries(np.random.default_rng(3).normal(0, 100, 64))
        base = BessParameters(soc_max=0.9, soc_min=0.1)
        shifted = BessParameters(soc_max=0.9, soc_min=0.1,
                                 initial_energy_offset_kwh=12345.0)
        assert size_bess_energy(series, base) == pytest.approx(
            size_bess_energy(series, shifted))

    def test_homogeneity_in_scale(self):
        samples = np.random.default_rng(4).normal(0, 100, 64)
        params = BessParameters(soc_max=0.9, soc_min=0.1)
        one = size_bess_energy(TimeSeries(samples), params)
        three = size_bess_energy(TimeSeries(3.0 * samples), params)
        assert three == pytest.approx(3.0 * one)
        assert size_bess_power(TimeSeries(3.0 * samples)) == pytest.approx(
            3.0 * size_bess_power(TimeSeries(samples)))

    def test_degenerate_soc_window_rejected(self):
        with pytest.raises(ValueError):
            BessParameters(soc_max=0.5, soc_min=0.5)

    def test_trajectory_offset(self):
        series = TimeSeries(np.array([1.0, 2.0]), 1.0)
        assert np.allclose(stored_energy_trajectory(series, 10.0),
                           [11.0, 13.0])


class TestEfficiencyPenaltyDirection:
    def test_dc_power_rating_at_least_ac_when_peak_is_discharge(self):
        rng = np.random.default_rng(5)
        samples = rng.normal(50, 100, 300)  # discharge-tilted
        series = TimeSeries(samples)
        if abs(samples.max()) > abs(samples.min()):
            dc = bess_dc_power(series, 0.9)
            assert size_bess_power(dc) >= np.abs(samples).max()


class TestAllocateNgUnits:
    def test_partition_of_table_style_total(self):
        units = allocate_ng_units(3301.9, 500.0, 500.0)
        assert units == pytest.approx([500.0] * 5 + [301.9])
        assert sum(units) == pytest.approx(2801.9, abs=1e-9)

    def test_total_equals_biomass_gives_empty(self):
        assert allocate_ng_units(500.0, 500.0, 500.0) == []

    def test_remainder_only_block(self):
        assert allocate_ng_units(999.0, 500.0, 500.0) == pytest.approx([499.0])

    def test_exact_multiple_no_remainder(self):
        assert allocate_ng_units(2500.0, 500.0, 500.0) == pytest.approx(
            [500.0] * 4)

    def test_units_never_exceed_cap(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            total = float(rng.uniform(100, 10_000))
            biomass = float(rng.uniform(0, total))
            cap = float(rng.uniform(50, 2000))
            units = allocate_ng_units(total, biomass, cap)
            assert all(u <= cap + 1e-9 for u in units)
            assert sum(units) == pytest.approx(total - biomass, rel=1e-9,
                                               abs=1e-9)

    def test_biomass_exceeding_total_rejected(self):
        with pytest.raises(ValueError):
            allocate_ng_units(400.0, 500.0, 500.0)


class TestFleetDesign:
    def test_consistency_enforced(self):
        with pytest.raises(ValueError):
            FleetDesign(pv_kw=0, wt_kw=0, biomass_kw=500.0,
                        ng_units_kw=(500.0,), genset_total_nominal_kw=1500.0,
                        bess_power_kw=0.0, bess_energy_kwh=0.0)

    def test_properties(self):
        fleet = FleetDesign(pv_kw=3000, wt_kw=1000, biomass_kw=500.0,
                            ng_units_kw=(500.0, 300.0),
                            genset_total_nominal_kw=1300.0,
                            bess_power_kw=850.0, bess_energy_kwh=1200.0)
        assert fleet.largest_dispatchable_kw == 500.0
        assert fleet.dispatchable_total_kw == pytest.approx(2150.0)
