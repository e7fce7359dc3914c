import math

import numpy as np
import pytest

from paraep import (AboveThresholdError, SystemParams, ValidationError,
                    langevin_mc, loss_partition, optimal_quadrature,
                    output_psd, squeezing_spectrum)

FIG6 = SystemParams(gamma1=0.1, gamma2=0.1, g=0.9, f=0.9, kappa=1.0, rho=0.9)


def single_opo_closed_form(omega, g, gamma, rho):
    """Canonical degenerate-OPO output spectra (X anti-squeezed, Y squeezed)."""
    g_ex = rho * gamma
    sx = 1.0 + 4.0 * g_ex * g / ((gamma - g) ** 2 + omega ** 2)
    sy = 1.0 - 4.0 * g_ex * g / ((gamma + g) ** 2 + omega ** 2)
    return sx, sy


class TestOutputPsd:
    def test_passive_identity(self):
        p = SystemParams(gamma1=0.25, gamma2=0.25, kappa=1.3, rho=0.37)
        for omega in (0.0, 0.4, 2.0):
            assert np.max(np.abs(output_psd(p, omega) - np.eye(4))) < 1e-12

    @pytest.mark.parametrize("omega", [0.0, 0.1, 0.5, 1.7])
    def test_single_opo_closed_form(self, omega):
        p = SystemParams(gamma1=0.25, gamma2=0.25, g=0.125, kappa=0.0, rho=0.8)
        s = output_psd(p, omega)
        sx, sy = single_opo_closed_form(omega, 0.125, 0.25, 0.8)
        assert s[0, 0] == pytest.approx(sx, abs=1e-9)
        assert s[1, 1] == pytest.approx(sy, abs=1e-9)

    def test_perfect_squeezing_at_threshold(self):
        p = SystemParams(gamma1=0.25, gamma2=0.25, g=0.25 * (1 - 1e-9),
                         kappa=0.0, rho=1.0)
        s = output_psd(p, 0.0)
        assert s[1, 1] == pytest.approx(0.0, abs=1e-6)

    def test_above_threshold_rejected(self):
        p = SystemParams(gamma1=0.25, gamma2=0.25, g=1.2, f=1.2, kappa=1.0)
        with pytest.raises(AboveThresholdError):
            output_psd(p, 0.5)

    def test_high_frequency_vacuum_limit(self):
        s = output_psd(FIG6, 1000.0 * 0.1)
        assert np.linalg.norm(s - np.eye(4)) <= 1e-3

    def test_loss_partition(self):
        g_ex, g_i = loss_partition(FIG6)
        assert g_ex == pytest.approx(0.09)
        assert g_i == pytest.approx(0.01)
        assert g_ex + g_i == pytest.approx(0.1)


class TestSqueezingSpectrum:
    def test_fig6_band_and_conjugate(self):
        spec = squeezing_spectrum(FIG6, omegas=np.linspace(0.0, 3.0, 301))
        below = spec.s_min < 1.0
        assert below.any()
        assert np.all(spec.s_max[below] > 1.0)

    def test_uncertainty_product(self):
        spec = squeezing_spectrum(FIG6, omegas=np.linspace(0.0, 5.0, 201))
        assert np.all(spec.s_min * spec.s_max >= 1.0 - 1e-9)

    def test_band_shifts_with_kappa(self):
        base = SystemParams(gamma1=0.1, gamma2=0.1, rho=0.9)
        mins = []
        for kap in (1.0, 2.0):
            p = base.with_(kappa=kap, g=0.5 * kap, f=0.5 * kap)
            spec = squeezing_spectrum(p, omegas=np.linspace(0.0, 8.0, 801))
            mins.append(spec.omegas[int(np.argmin(spec.s_min))])
        assert mins[1] > mins[0]

    def test_three_db_limit_near_ep(self):
        p = SystemParams(gamma1=0.1, gamma2=0.1, g=1.0, f=1.0, kappa=1.0,
                         rho=1.0)
        spec = squeezing_spectrum(p, omegas=np.linspace(0.3, 1.0, 701))
        assert np.min(spec.s_min) == pytest.approx(0.5, abs=0.02)
        # analytic optimum sits at Omega^2 = 4 gamma kappa - gamma^2
        w_best = spec.omegas[int(np.argmin(spec.s_min))]
        assert w_best == pytest.approx(math.sqrt(0.39), abs=0.01)

    def test_power_grid_consistent_with_extrema(self):
        spec = squeezing_spectrum(FIG6, omegas=np.linspace(0.0, 3.0, 31),
                                  thetas=np.linspace(0.0, math.pi, 721))
        assert np.max(np.abs(np.min(spec.power, axis=1) - spec.s_min)) < 1e-4
        assert np.max(np.abs(np.max(spec.power, axis=1) - spec.s_max)) < 1e-4


class TestOptimalQuadrature:
    def test_single_opo_optimum_is_y(self):
        p = SystemParams(gamma1=0.25, gamma2=0.25, g=0.125, kappa=0.0, rho=0.8)
        for omega in (0.0, 0.3, 1.0):
            theta, s_min = optimal_quadrature(p, omega)
            assert theta == pytest.approx(math.pi / 2.0, abs=1e-9)
            _, sy = single_opo_closed_form(omega, 0.125, 0.25, 0.8)
            assert s_min == pytest.approx(sy, abs=1e-12)

    def test_detuning_free_rotation_with_coupling(self):
        # moving off the single-OPO limit rotates theta* continuously while
        # squeezing survives in the band
        spec = squeezing_spectrum(FIG6, omegas=np.linspace(0.8, 2.0, 25))
        assert np.all(spec.s_min < 1.0)
        assert np.all(np.isfinite(spec.theta_star))

    def test_pump_phase_flip_rotates_port2_quadrature(self):
        p = SystemParams(gamma1=0.25, gamma2=0.25, g=0.0, f=0.1, kappa=0.0,
                         rho=0.8)
        th1, _ = optimal_quadrature(p, 0.2, port=1)
        th2, _ = optimal_quadrature(p.with_(phi=p.phi + math.pi), 0.2, port=1)
        delta = abs(th1 - th2) % math.pi
        assert min(delta, math.pi - delta) == pytest.approx(math.pi / 2.0,
                                                            abs=1e-9)


class TestLangevinMC:
    def test_passive_flat_spectrum(self):
        p = SystemParams(gamma1=0.25, gamma2=0.25, kappa=1.0, rho=0.5)
        mc = langevin_mc(p, seed=3, duration=400.0, ensemble=20,
                         nperseg=4096, omega_max=3.0)
        vals = mc.quadrature(0, 0.0)[mc.omegas > 0.1]
        assert abs(np.mean(vals) - 1.0) < 0.05

    def test_single_opo_matches_closed_form(self):
        p = SystemParams(gamma1=0.25, gamma2=0.25, g=0.125, kappa=0.0, rho=0.8)
        mc = langevin_mc(p, seed=5, duration=1500.0, ensemble=30,
                         nperseg=16384, omega_max=2.0)
        band = mc.omegas > 0.0
        _, sy_ref = single_opo_closed_form(mc.omegas[band], 0.125, 0.25, 0.8)
        est = mc.quadrature(0, math.pi / 2.0)[band]
        rel = (est - sy_ref) / sy_ref
        assert math.sqrt(float(np.mean(rel ** 2))) < 0.10

    def test_deterministic_for_fixed_seed(self):
        p = FIG6
        runs = [langevin_mc(p, seed=11, duration=200.0, ensemble=4,
                            nperseg=4096, omega_max=2.0) for _ in range(2)]
        for key in runs[0].power:
            assert np.array_equal(runs[0].power[key], runs[1].power[key])

    def test_seed_changes_estimate(self):
        p = FIG6
        a = langevin_mc(p, seed=1, duration=200.0, ensemble=2, nperseg=4096)
        b = langevin_mc(p, seed=2, duration=200.0, ensemble=2, nperseg=4096)
        assert not np.array_equal(a.quadrature(0, 0.0), b.quadrature(0, 0.0))

    def test_validation(self):
        with pytest.raises(AboveThresholdError):
            langevin_mc(SystemParams(gamma1=0.25, gamma2=0.25, g=1.2, f=1.2,
                                     kappa=1.0), duration=100.0, nperseg=512)
        with pytest.raises(ValidationError):
            langevin_mc(FIG6, dt=0.5, duration=100.0, nperseg=512)
        with pytest.raises(ValidationError):
            langevin_mc(FIG6, duration=10.0, nperseg=65536)

    def test_error_shrinks_with_ensemble(self):
        # fixed seeds make this a deterministic check of 1/sqrt(N) behaviour
        p = SystemParams(gamma1=0.25, gamma2=0.25, g=0.125, kappa=0.0, rho=0.8)

        def rms(ensemble):
            mc = langevin_mc(p, seed=13, duration=800.0, ensemble=ensemble,
                             nperseg=8192, omega_max=2.0)
            band = mc.omegas > 0.0
            _, sy = single_opo_closed_form(mc.omegas[band], 0.125, 0.25, 0.8)
            est = mc.quadrature(0, math.pi / 2.0)[band]
            return float(np.sqrt(np.mean(((est - sy) / sy) ** 2)))

        assert rms(24) < 0.75 * rms(3)
