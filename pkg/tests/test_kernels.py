"""Backend equivalence: the compiled extension must reproduce the pure-Python
reference kernels step for step."""

import math

import numpy as np
import pytest

from paraep._kernels import (DRIVE_AM, DRIVE_CONSTANT, DRIVE_LOOP, STATUS_OK,
                             STATUS_STEP_UNDERFLOW, available_backends,
                             get_backend)

HAVE_COMPILED = "compiled" in available_backends()
needs_compiled = pytest.mark.skipif(not HAVE_COMPILED,
                                    reason="compiled extension not built")

PARS_FIELDS = (0.25, 0.25, -0.1, 0.3, 0.3, 1.0, math.cos(0.7), math.sin(0.7))


@needs_compiled
class TestBackendEquivalence:
    def test_integrate_fields_matches(self):
        ref, core = get_backend("python"), get_backend("compiled")
        c = (1.5, 0.4, 0.05, 0.0, 0.0, 0.0)
        y0 = (1e-6, 2e-6, -1e-6, 5e-7)
        a = ref.integrate_fields(PARS_FIELDS, DRIVE_CONSTANT, c, y0, 0.0,
                                 150.0, 128, 1e-9, 1e-12, 10 ** 7)
        b = core.integrate_fields(PARS_FIELDS, DRIVE_CONSTANT, c, y0, 0.0,
                                  150.0, 128, 1e-9, 1e-12, 10 ** 7)
        assert a[1] == b[1] and a[2] == b[2]  # identical step counts
        assert np.max(np.abs(a[0] - b[0])) < 1e-10

    def test_integrate_fields_modulated(self):
        ref, core = get_backend("python"), get_backend("compiled")
        c = (1.0, 5.0, 10.0, 0.4, 0.0, 1.0)  # AM with tied pumps
        y0 = (1e-3, 0.0, 0.0, 1e-3)
        a = ref.integrate_fields(PARS_FIELDS, DRIVE_AM, c, y0, 0.0, 20.0,
                                 64, 1e-10, 1e-13, 10 ** 7)
        b = core.integrate_fields(PARS_FIELDS, DRIVE_AM, c, y0, 0.0, 20.0,
                                  64, 1e-10, 1e-13, 10 ** 7)
        assert np.max(np.abs(a[0] - b[0])) < 1e-10

    def test_propagate_quadrature_matches(self):
        ref, core = get_backend("python"), get_backend("compiled")
        c = (1.2, 5.0, 10.0, 1.2, 0.0, 1.0)
        m0 = np.eye(4)
        a = ref.propagate_quadrature(0.25, 1.0, 1.0, 0.0, DRIVE_AM, c, m0,
                                     0.0, 2 * math.pi / 10.0, 1e-12, 1e-14,
                                     10 ** 7)
        b = core.propagate_quadrature(0.25, 1.0, 1.0, 0.0, DRIVE_AM, c, m0,
                                      0.0, 2 * math.pi / 10.0, 1e-12, 1e-14,
                                      10 ** 7)
        assert a[3] == STATUS_OK and b[3] == STATUS_OK
        assert np.max(np.abs(a[0] - b[0])) < 1e-12

    def test_propagate_field_linear_matches(self):
        ref, core = get_backend("python"), get_backend("compiled")
        pars = (0.25, 0.25, 0.0, 1.0, 1.0, 0.0)
        c = (1.0, 0.2, 2 * math.pi / 3000.0, 0.0, 0.0, 0.0)
        v0 = np.array([0.5, 0.1, 0.5, -0.1, 0.3, 0.2, 0.3, -0.2])
        a = ref.propagate_field_linear(pars, DRIVE_LOOP, c, v0, 750.0, 1150.0,
                                       16, 1e-11, 1e-13, 10 ** 7)
        b = core.propagate_field_linear(pars, DRIVE_LOOP, c, v0, 750.0, 1150.0,
                                        16, 1e-11, 1e-13, 10 ** 7)
        assert np.max(np.abs(a[0] - b[0])) < 1e-9
        assert np.max(np.abs(a[1] - b[1])) < 1e-9  # log-norm records

    def test_euler_maruyama_matches(self):
        ref, core = get_backend("python"), get_backend("compiled")
        rng = np.random.default_rng(4)
        q = np.array([[-0.1 + 0.9, 0, 0, -1.0], [0, -0.1 - 0.9, 1.0, 0],
                      [0, -1.0, -0.1 + 0.9, 0], [1.0, 0, 0, -0.1 - 0.9]])
        n = 5000
        dw_ex = rng.normal(0, math.sqrt(0.005), (n, 4))
        dw_i = rng.normal(0, math.sqrt(0.005), (n, 4))
        ya = np.empty((n, 4))
        yb = np.empty((n, 4))
        ref.euler_maruyama(q, 0.42, 0.14, 0.005, dw_ex, dw_i, ya)
        core.euler_maruyama(q, 0.42, 0.14, 0.005, dw_ex, dw_i, yb)
        assert np.max(np.abs(ya - yb)) < 1e-10 * max(1.0, np.max(np.abs(ya)))


class TestReferenceKernelBehaviour:
    def test_pure_decay_accuracy(self):
        ref = get_backend("python")
        pars = (0.25, 0.25, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0)
        c = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
        out, ns, nr, status, n_done, _ = ref.integrate_fields(
            pars, DRIVE_CONSTANT, c, (1.0, 0.0, 0.0, 0.0), 0.0, 10.0, 50,
            1e-10, 1e-13, 10 ** 7)
        t = np.linspace(0, 10, 51)
        assert status == STATUS_OK
        assert np.max(np.abs(out[:, 0] - np.exp(-0.25 * t))) < 1e-8

    def test_blowup_reports_partial(self):
        # unsaturated gain far above threshold overflows -> step underflow
        ref = get_backend("python")
        pars = (0.25, 0.25, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0)
        c = (5.0, 5.0, 0.0, 0.0, 0.0, 0.0)
        out, ns, nr, status, n_done, _ = ref.integrate_fields(
            pars, DRIVE_CONSTANT, c, (1.0, 0.0, 0.0, 0.0), 0.0, 400.0, 100,
            1e-9, 1e-12, 10 ** 7)
        assert status == STATUS_STEP_UNDERFLOW
        assert 0 < n_done < 100
        assert np.all(np.isfinite(out[:n_done + 1]))
        assert np.all(np.isnan(out[n_done + 2:]))

    def test_determinism(self):
        ref = get_backend("python")
        c = (1.5, 0.4, 0.0, 0.0, 0.0, 0.0)
        runs = [ref.integrate_fields(PARS_FIELDS, DRIVE_CONSTANT, c,
                                     (1e-6, 0, 0, 1e-6), 0.0, 50.0, 32,
                                     1e-9, 1e-12, 10 ** 7)[0]
                for _ in range(2)]
        assert np.array_equal(runs[0], runs[1])
