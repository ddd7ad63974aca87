import math

import numpy as np
import pytest

from cowsim.optics import (
    BinAmplitude,
    OpticalParams,
    attenuate,
    beamsplit,
    click_probability,
    detectable_fraction,
    effective_mu,
    monitor_port_mean,
    sample_click,
    splittable_fraction,
    vacuum_overlap,
)

RNG = lambda: np.random.default_rng(1234)


class TestAttenuate:
    def test_identity(self):
        assert attenuate(BinAmplitude(0.5), 1.0).mean_photons == 0.5

    def test_full_block(self):
        assert attenuate(BinAmplitude(0.5), 0.0).mean_photons == 0.0

    def test_product(self):
        assert attenuate(BinAmplitude(0.5), 0.2).mean_photons == pytest.approx(0.1, abs=1e-15)

    def test_phase_preserved(self):
        assert attenuate(BinAmplitude(0.5, phase=0.3), 0.2).phase == 0.3

    def test_range_rejected(self):
        with pytest.raises(ValueError):
            attenuate(BinAmplitude(0.5), 1.5)
        with pytest.raises(ValueError):
            attenuate(BinAmplitude(0.5), -0.1)

    def test_matches_binomial_thinning(self):
        # oracle: a Poisson(mu) photon number thinned binomially with p
        # must look like Poisson(mu * p)
        rng = RNG()
        n = rng.poisson(0.5, size=1_000_000)
        thinned = rng.binomial(n, 0.2)
        seen = np.mean(thinned >= 1)
        expect = 1 - math.exp(-attenuate(BinAmplitude(0.5), 0.2).mean_photons)
        se = math.sqrt(expect * (1 - expect) / n.size)
        assert abs(seen - expect) < 3 * se


class TestBeamsplit:
    def test_paper_ratio(self):
        data, mon = beamsplit(BinAmplitude(1.0), 0.9)
        assert data.mean_photons == pytest.approx(0.9, abs=1e-15)
        assert mon.mean_photons == pytest.approx(0.1, abs=1e-15)

    def test_vacuum(self):
        data, mon = beamsplit(BinAmplitude(0.0), 0.3)
        assert data.mean_photons == 0.0 and mon.mean_photons == 0.0

    def test_symmetric(self):
        data, mon = beamsplit(BinAmplitude(0.5), 0.5)
        assert data.mean_photons == mon.mean_photons == 0.25

    @pytest.mark.parametrize("mu", [0.1, 0.5, 1.0, 3.7])
    @pytest.mark.parametrize("t_b", [0.0, 0.25, 0.9, 1.0])
    def test_energy_conserved(self, mu, t_b):
        data, mon = beamsplit(BinAmplitude(mu), t_b)
        assert abs(data.mean_photons + mon.mean_photons - mu) < 1e-12


class TestMonitorPort:
    def test_intact_pair_cancels(self):
        assert monitor_port_mean(BinAmplitude(0.5), BinAmplitude(0.5), 1.0) == 0.0

    def test_lone_pulse(self):
        # a single surviving pulse loses half at each coupler: mu / 4
        assert monitor_port_mean(BinAmplitude(0.5), BinAmplitude(0.0), 1.0) == pytest.approx(
            0.125, abs=1e-15
        )
        assert monitor_port_mean(BinAmplitude(0.0), BinAmplitude(0.5), 0.3) == pytest.approx(
            0.125, abs=1e-15
        )

    def test_both_empty(self):
        assert monitor_port_mean(BinAmplitude(0.0), BinAmplitude(0.0), 0.7) == 0.0

    @pytest.mark.parametrize("v", [0.0, 0.5, 0.9, 1.0])
    @pytest.mark.parametrize("mus", [(0.1, 0.9), (0.5, 0.5), (2.0, 0.0)])
    def test_never_negative(self, v, mus):
        assert monitor_port_mean(BinAmplitude(mus[0]), BinAmplitude(mus[1]), v) >= 0.0

    def test_phase_dependence(self):
        # opposite phases interfere constructively at the destructive port
        out = monitor_port_mean(BinAmplitude(0.5, 0.0), BinAmplitude(0.5, math.pi), 1.0)
        assert out == pytest.approx(0.5, abs=1e-12)


class TestClickProbability:
    def test_vacuum_ideal(self):
        assert click_probability(0.0, 1.0, 0.0) == 0.0

    def test_half_photon(self):
        assert click_probability(0.5, 1.0, 0.0) == pytest.approx(1 - math.exp(-0.5), abs=1e-12)

    def test_dark_floor(self):
        assert click_probability(0.0, 1.0, 0.01) == pytest.approx(0.01, abs=1e-12)

    def test_monte_carlo(self):
        rng = RNG()
        n = rng.poisson(0.5, size=1_000_000)
        seen = np.mean(n >= 1)
        p = click_probability(0.5, 1.0, 0.0)
        se = math.sqrt(p * (1 - p) / n.size)
        assert abs(seen - p) < 3 * se

    def test_overlap_consistency(self):
        # with a perfect noiseless detector, no-click prob is the squared
        # vacuum overlap
        for mu in np.linspace(0.05, 2.0, 10):
            no_click = 1 - click_probability(mu, 1.0, 0.0)
            assert no_click == pytest.approx(vacuum_overlap(mu) ** 2, abs=1e-12)


class TestSampleClick:
    def test_degenerate(self):
        rng = RNG()
        assert not any(sample_click(0.0, rng) for _ in range(100))
        assert all(sample_click(1.0, rng) for _ in range(100))

    def test_fair(self):
        rng = RNG()
        hits = np.mean(rng.random(1_000_000) < 0.5)
        assert abs(hits - 0.5) < 3 * 0.0005

    def test_range(self):
        with pytest.raises(ValueError):
            sample_click(1.5, RNG())


class TestClosedForms:
    def test_vacuum_overlap(self):
        assert vacuum_overlap(0.0) == 1.0
        assert vacuum_overlap(0.5) == pytest.approx(math.exp(-0.25), abs=1e-15)
        for mu in (0.1, 0.5, 1.0):
            assert vacuum_overlap(mu) ** 2 == pytest.approx(math.exp(-mu), abs=1e-12)

    def test_detectable(self):
        assert detectable_fraction(0.0) == 0.0
        assert detectable_fraction(0.5) == pytest.approx(0.3934693402873666, abs=1e-9)
        values = [detectable_fraction(mu) for mu in np.arange(0.01, 10, 0.01)]
        assert all(b > a for a, b in zip(values, values[1:]))
        assert detectable_fraction(50.0) > 1 - 1e-12

    def test_splittable(self):
        assert splittable_fraction(0.0) == 0.0
        assert splittable_fraction(1e-9) < 1e-8
        # frozen from the closed form (1 - (1+mu)e^-mu) / (1 - e^-mu)
        assert splittable_fraction(0.5) == pytest.approx(0.22925295873160084, abs=1e-9)
        values = [splittable_fraction(mu) for mu in np.arange(0.01, 10.01, 0.01)]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_splittable_monte_carlo(self):
        rng = RNG()
        n = rng.poisson(0.5, size=1_000_000)
        detectable = n >= 1
        frac = np.mean(n[detectable] >= 2)
        p = splittable_fraction(0.5)
        se = math.sqrt(p * (1 - p) / detectable.sum())
        assert abs(frac - p) < 3 * se

    def test_effective_mu(self):
        assert effective_mu(0.5, 1, 1, 1) == 0.5
        assert effective_mu(0.5, 0.2, 0.9, 0.1) == pytest.approx(0.009, abs=1e-15)
        for t in (0.01, 0.5, 1.0):
            for eta in (0.01, 0.5, 1.0):
                assert effective_mu(0.5, t, 0.9, eta) <= 0.5


class TestParams:
    def test_ranges_enforced(self):
        with pytest.raises(ValueError):
            OpticalParams(channel_t=1.2)
        with pytest.raises(ValueError):
            OpticalParams(p_dark_data=1.0)
        with pytest.raises(ValueError):
            BinAmplitude(-0.1)
