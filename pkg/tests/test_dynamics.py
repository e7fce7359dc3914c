import math

import numpy as np
import pytest

from paraep import (Constant, FieldState, IntegrationError, Regime,
                    SimSettings, SystemParams, ValidationError,
                    classify_regime, integrate, max_growth_rate,
                    simulate_and_classify, phase_diagram, transition_scan)

GAM = 0.25


def seeded_state(seed=1, amp=1e-6):
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(4)
    return FieldState(a=amp * complex(z[0], z[1]), b=amp * complex(z[2], z[3]))


class TestIntegrate:
    def test_pure_decay(self):
        p = SystemParams(gamma1=GAM, gamma2=GAM)
        tr = integrate(p, Constant(), FieldState(a=1.0), (0.0, 20.0),
                       rtol=1e-10, atol=1e-12, n_samples=200)
        assert np.max(np.abs(tr.a - np.exp(-GAM * tr.t))) < 1e-8
        assert np.max(np.abs(tr.b)) == 0.0

    def test_single_opo_saturated_intensity(self):
        p = SystemParams(gamma1=GAM, gamma2=GAM, g=1.5, gs1=0.3, gs2=0.3)
        tr = integrate(p, Constant(), FieldState(a=1e-6), (0.0, 100.0),
                       n_samples=512)
        assert tr.intensity_a[-1] == pytest.approx(25.0 / 6.0, rel=1e-6)

    def test_linear_growth_matches_rates(self):
        # just above threshold the intensity grows like exp(2 max_rate t)
        g = 1.05 * math.sqrt(GAM ** 2 + 1.0)
        p = SystemParams(gamma1=GAM, gamma2=GAM, g=g, f=g, kappa=1.0)
        lam = max_growth_rate(p)
        tr = integrate(p, Constant(), seeded_state(), (0.0, 60.0),
                       n_samples=600)
        i1 = tr.intensity_a[200] + tr.intensity_b[200]
        i2 = tr.intensity_a[-1] + tr.intensity_b[-1]
        measured = math.log(i2 / i1) / (2.0 * (tr.t[-1] - tr.t[200]))
        assert measured == pytest.approx(lam, rel=0.01)

    def test_tolerance_scaling(self):
        p = SystemParams(gamma1=GAM, gamma2=GAM, g=0.9, f=0.4, gs1=0.3,
                         gs2=0.3, kappa=1.0)
        s0 = FieldState(a=0.1 + 0.05j, b=-0.07j)
        ref = integrate(p, Constant(), s0, (0.0, 30.0), rtol=1e-12,
                        atol=1e-12, n_samples=64).a[-1]
        errs = []
        for rtol in (1e-5, 1e-6, 1e-7, 1e-8):
            tr = integrate(p, Constant(), s0, (0.0, 30.0), rtol=rtol,
                           atol=1e-12, n_samples=64)
            errs.append(abs(tr.a[-1] - ref))
        assert all(a > b for a, b in zip(errs, errs[1:]))

    def test_tolerances_validated(self):
        p = SystemParams()
        with pytest.raises(ValidationError):
            integrate(p, rtol=1e-2)
        with pytest.raises(ValidationError):
            integrate(p, atol=1e-13)
        with pytest.raises(ValidationError):
            integrate(p, t_span=(1.0, 0.5))

    def test_blowup_raises_with_partial(self):
        p = SystemParams(gamma1=GAM, gamma2=GAM, g=5.0, f=5.0, kappa=1.0)
        with pytest.raises(IntegrationError) as info:
            integrate(p, Constant(), FieldState(a=1.0), (0.0, 500.0),
                      n_samples=256)
        partial = info.value.partial
        assert partial is not None
        assert partial.t[-1] < 500.0
        assert np.all(np.isfinite(partial.a))


class TestClassifyRegime:
    def test_fig2_nondegenerate_point(self):
        p = SystemParams(gamma1=GAM, gamma2=GAM, g=1.5, f=0.4, gs1=0.3,
                         gs2=0.3, kappa=1.0)
        lab = simulate_and_classify(p, SimSettings())
        assert lab.regime is Regime.NONDEGENERATE
        assert lab.sideband_offset > 0.05

    def test_fig2_degenerate_point(self):
        p = SystemParams(gamma1=0.75, gamma2=0.75, g=1.0, f=1.5, gs1=0.3,
                         gs2=0.3, kappa=1.0)
        lab = simulate_and_classify(p, SimSettings())
        assert lab.regime is Regime.DEGENERATE
        assert lab.sideband_offset == 0.0

    def test_below_threshold_point(self):
        p = SystemParams(gamma1=GAM, gamma2=GAM, g=0.5, f=0.5, gs1=0.3,
                         gs2=0.3, kappa=1.0)
        lab = simulate_and_classify(p, SimSettings(horizon=500.0))
        assert lab.regime is Regime.BELOW

    def test_phase_rotation_invariance(self):
        p = SystemParams(gamma1=GAM, gamma2=GAM, g=1.5, f=0.4, gs1=0.3,
                         gs2=0.3, kappa=1.0)
        s0 = seeded_state(3)
        rot = np.exp(0.6j)
        labels = []
        for s in (s0, FieldState(a=rot * s0.a, b=rot * s0.b)):
            tr = integrate(p, Constant(), s, (0.0, 2000.0), n_samples=4096)
            labels.append(classify_regime(tr))
        assert labels[0].regime == labels[1].regime
        assert labels[0].sideband_offset == pytest.approx(
            labels[1].sideband_offset, rel=1e-3)

    def test_exchange_invariance_symmetric_params(self):
        p = SystemParams(gamma1=GAM, gamma2=GAM, g=1.2, f=1.2, gs1=0.3,
                         gs2=0.3, kappa=1.0)
        s0 = seeded_state(5)
        swapped = FieldState(a=s0.b, b=s0.a)
        labels = []
        for s in (s0, swapped):
            tr = integrate(p, Constant(), s, (0.0, 2000.0), n_samples=4096)
            labels.append(classify_regime(tr))
        assert labels[0].regime == labels[1].regime
        assert labels[0].sideband_offset == pytest.approx(
            labels[1].sideband_offset, abs=1e-6)

    def test_symmetric_sidebands(self):
        p = SystemParams(gamma1=GAM, gamma2=GAM, g=1.5, f=0.4, gs1=0.3,
                         gs2=0.3, kappa=1.0)
        tr = integrate(p, Constant(), seeded_state(7), (0.0, 3000.0),
                       n_samples=4096)
        lab = classify_regime(tr)
        w_plus, w_minus = lab.sideband_pair
        resolution = 2 * math.pi / (0.3 * 3000.0)
        assert abs(w_plus + w_minus) < resolution

    def test_offset_matches_linear_splitting_near_onset(self):
        p = SystemParams(gamma1=GAM, gamma2=GAM, g=0.95, f=0.4, gs1=0.3,
                         gs2=0.3, kappa=1.0)
        from paraep import growth_rates
        rates, splits = growth_rates(p)
        lab = simulate_and_classify(p, SimSettings())
        assert lab.regime is Regime.NONDEGENERATE
        assert lab.sideband_offset == pytest.approx(splits[0], rel=0.05)

    def test_window_too_short_rejected(self):
        p = SystemParams(gamma1=GAM, gamma2=GAM)
        tr = integrate(p, Constant(), FieldState(a=1.0), (0.0, 10.0),
                       n_samples=64)
        with pytest.raises(ValidationError):
            classify_regime(tr, settle_fraction=0.9)


class TestSweeps:
    def test_phase_diagram_small_grid(self):
        base = SystemParams(gamma1=GAM, gamma2=GAM, gs1=0.3, gs2=0.3,
                            kappa=1.0)
        sim = SimSettings(horizon=1500.0, n_samples=2048)
        pd = phase_diagram(base, ("phi", 0.0, math.pi, 3),
                           ("fg", 0.5, 1.6, 4), sim)
        assert pd.regime.shape == (3, 4)
        assert not pd.failed.any()
        # phi = 0 row: below threshold until sqrt(gamma^2 + kappa^2)
        g_th = math.sqrt(GAM ** 2 + 1.0)
        for j, g in enumerate(pd.axis2):
            if g < 0.95 * g_th:
                assert pd.regime[0, j] == "below"

    def test_phase_diagram_deterministic_under_workers(self, monkeypatch):
        base = SystemParams(gamma1=GAM, gamma2=GAM, gs1=0.3, gs2=0.3,
                            kappa=1.0)
        sim = SimSettings(horizon=800.0, n_samples=1024)
        monkeypatch.setenv("PARA_EP_THREADS", "1")
        pd1 = phase_diagram(base, ("phi", 0.0, 3.0, 2), ("fg", 1.2, 1.5, 2),
                            sim)
        monkeypatch.setenv("PARA_EP_THREADS", "4")
        pd2 = phase_diagram(base, ("phi", 0.0, 3.0, 2), ("fg", 1.2, 1.5, 2),
                            sim)
        assert np.array_equal(pd1.sideband_offset, pd2.sideband_offset)
        assert (pd1.regime == pd2.regime).all()

    def test_white_region_at_small_pump_for_all_phases(self):
        base = SystemParams(gamma1=GAM, gamma2=GAM, gs1=0.3, gs2=0.3,
                            kappa=1.0)
        sim = SimSettings(horizon=800.0, n_samples=1024)
        pd = phase_diagram(base, ("phi", 0.0, 2.0 * math.pi, 5),
                           ("fg", 0.1, 0.15, 2), sim)
        assert (pd.regime == "below").all()

    def test_transition_scan_control_without_saturation(self):
        base = SystemParams(gamma1=GAM, gamma2=GAM, kappa=1.0)
        scan = transition_scan(base, math.pi, 1.2, 3.5, 6, SimSettings())
        labels = [lab for _, lab in scan if lab is not None]
        assert labels, "control scan produced no classifiable cells"
        assert all(lab.regime is Regime.NONDEGENERATE for lab in labels)
        # offset tracks the linear splitting (= kappa for phi = pi)
        for (g, lab) in scan:
            if lab is not None:
                assert lab.sideband_offset == pytest.approx(1.0, rel=0.05)
