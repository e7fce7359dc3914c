"""Pure-Python reference implementation of the hot kernels.

Algorithmically identical to the compiled extension ``_core``: an adaptive
Dormand-Prince 5(4) stepper with FSAL reuse, proportional step control and
exact landing on output sample times, plus an Euler-Maruyama recursion for
the quadrature Langevin system.  The compiled module is preferred at import
time; this module keeps the package fully functional without a C toolchain
and serves as the reference in backend-equivalence tests.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND_NAME = "python"

# Drive schedule encodings shared with the compiled kernel.
DRIVE_CONSTANT = 0  # c = (g, f, delta1, -, -, -)
DRIVE_AM = 1        # c = (g0, F, omega, f_static, delta1, tie_f)
DRIVE_LOOP = 2      # c = (g0, r, signed_omega, -, -, -)

# Status codes returned by the integrators.
STATUS_OK = 0
STATUS_STEP_UNDERFLOW = 1
STATUS_MAX_STEPS = 2

# Dormand-Prince 5(4) tableau.
_A = (
    (),
    (1.0 / 5.0,),
    (3.0 / 40.0, 9.0 / 40.0),
    (44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0),
    (19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0),
    (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0,
     -5103.0 / 18656.0),
    (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0,
     11.0 / 84.0),
)
_C = (0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0)
_E = (71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0,
      -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)

_SAFETY = 0.9
_FAC_MIN = 0.2
_FAC_MAX = 5.0


def drive_eval(kind, c, t):
    """Instantaneous (g, f, delta1) for the packed drive encoding."""
    if kind == DRIVE_CONSTANT:
        return c[0], c[1], c[2]
    if kind == DRIVE_AM:
        g = c[0] + c[1] * math.sin(c[2] * t)
        f = g if c[5] != 0.0 else c[3]
        return g, f, c[4]
    phase = c[2] * t
    g = c[0] + c[1] * math.cos(phase)
    return g, g, c[1] * math.sin(phase)


class _AdaptiveStepper:
    """Generic DP5(4) driver over numpy state vectors.

    Integrates between consecutive output times, clamping the step to land
    exactly on each; the step size carries over across segments.
    """

    def __init__(self, rhs, t0, y0, rtol, atol, max_steps):
        self.rhs = rhs
        self.t = float(t0)
        self.y = np.asarray(y0, dtype=float).copy()
        self.rtol = float(rtol)
        self.atol = float(atol)
        self.max_steps = int(max_steps)
        self.nsteps = 0
        self.nrejected = 0
        self.err_last = 0.0
        self.h = 0.0
        self.k1 = None  # FSAL slot

    def advance_to(self, t_end):
        """Integrate self.y to t_end. Returns a status code."""
        n = self.y.size
        k = [None] * 7
        if self.k1 is None:
            self.k1 = self.rhs(self.t, self.y)
        if self.h <= 0.0:
            self.h = max(abs(t_end - self.t) * 1e-3, 1e-8)
        just_rejected = False
        while self.t < t_end:
            if self.nsteps >= self.max_steps:
                return STATUS_MAX_STEPS
            h = min(self.h, t_end - self.t)
            hmin = 16.0 * np.finfo(float).eps * max(abs(self.t), 1.0)
            if h < hmin:
                return STATUS_STEP_UNDERFLOW
            k[0] = self.k1
            y = self.y
            for i in range(1, 7):
                acc = y + h * sum(aij * k[j] for j, aij in enumerate(_A[i]))
                k[i] = self.rhs(self.t + _C[i] * h, acc)
                if i == 6:
                    ynew = acc  # stage 7 is evaluated at the 5th-order result
            err_vec = h * sum(e * k[j] for j, e in enumerate(_E))
            scale = self.atol + self.rtol * np.maximum(np.abs(y), np.abs(ynew))
            with np.errstate(invalid="ignore", over="ignore"):
                ratio = err_vec / scale
                err = math.sqrt(float(np.sum(ratio * ratio)) / n)
            if not math.isfinite(err):
                err = math.inf
            self.nsteps += 1
            if err <= 1.0:
                self.t += h
                self.y = ynew
                self.k1 = k[6]
                self.err_last = err
                fac = _SAFETY * (err ** -0.2) if err > 0.0 else _FAC_MAX
                fac = min(1.0 if just_rejected else _FAC_MAX, max(_FAC_MIN, fac))
                self.h = h * fac
                just_rejected = False
            else:
                self.nrejected += 1
                fac = _SAFETY * (err ** -0.2) if math.isfinite(err) else _FAC_MIN
                self.h = h * max(_FAC_MIN, fac)
                just_rejected = True
        return STATUS_OK


def integrate_fields(pars, kind, c, y0, t0, t1, n_out, rtol, atol, max_steps):
    """Integrate the nonlinear coupled-mode equations on a uniform grid.

    pars = (gamma1, gamma2, delta2, gs1, gs2, kappa, cos_phi, sin_phi).
    State layout: (Re a, Im a, Re b, Im b).

    Returns (samples[(n_out+1) x 4], nsteps, nrejected, status, n_done,
    err_last); samples beyond the last completed index are NaN on failure.
    """
    g1, g2, d2, gs1, gs2, kap, cphi, sphi = (float(v) for v in pars)

    def rhs(t, y):
        g, f, d1 = drive_eval(kind, c, t)
        a = complex(y[0], y[1])
        b = complex(y[2], y[3])
        fe = complex(f * cphi, f * sphi)
        da = ((-g1 + 1j * d1) * a + g * a.conjugate()
              - gs1 * (a.real * a.real + a.imag * a.imag) * a + 1j * kap * b)
        db = ((-g2 + 1j * d2) * b + fe * b.conjugate()
              - gs2 * (b.real * b.real + b.imag * b.imag) * b + 1j * kap * a)
        return np.array([da.real, da.imag, db.real, db.imag])

    out = np.full((n_out + 1, 4), np.nan)
    out[0] = y0
    stepper = _AdaptiveStepper(rhs, t0, y0, rtol, atol, max_steps)
    status = STATUS_OK
    n_done = 0
    dt_out = (t1 - t0) / n_out
    for i in range(1, n_out + 1):
        status = stepper.advance_to(t0 + i * dt_out)
        if status != STATUS_OK:
            break
        out[i] = stepper.y
        n_done = i
    return out, stepper.nsteps, stepper.nrejected, status, n_done, stepper.err_last


def propagate_quadrature(gamma, kappa, cphi, sphi, kind, c, m0, t0, t1,
                         rtol, atol, max_steps):
    """Propagate dM/dt = Q(t) M for the 4x4 quadrature generator.

    Returns (M(t1), nsteps, nrejected, status).
    """
    gamma = float(gamma)
    kappa = float(kappa)

    def rhs(t, y):
        g, f, _ = drive_eval(kind, c, t)
        q = np.array([
            [-gamma + g, 0.0, 0.0, -kappa],
            [0.0, -gamma - g, kappa, 0.0],
            [0.0, -kappa, -gamma + f * cphi, f * sphi],
            [kappa, 0.0, f * sphi, -gamma - f * cphi],
        ])
        return (q @ y.reshape(4, 4)).ravel()

    stepper = _AdaptiveStepper(rhs, t0, np.asarray(m0, float).ravel(),
                               rtol, atol, max_steps)
    status = stepper.advance_to(t1)
    return stepper.y.reshape(4, 4).copy(), stepper.nsteps, stepper.nrejected, status


def propagate_field_linear(pars, kind, c, v0, t0, t1, n_win, rtol, atol,
                           max_steps):
    """Propagate the linear field-basis system dv/dt = L(t) v in windows.

    pars = (gamma1, gamma2, delta2, kappa, cos_phi, sin_phi); v packed as
    (Re a, Im a, Re a*, Im a*, Re b, Im b, Re b*, Im b*)... i.e. the four
    complex components interleaved re/im.  The state is renormalized to unit
    norm after every window to suppress net growth or decay; the discarded
    log-norms are accumulated per window.

    Returns (samples[(n_win+1) x 8], lognorm[n_win], nsteps, nrejected,
    status, n_done).
    """
    g1, g2, d2, kap, cphi, sphi = (float(v) for v in pars)

    def rhs(t, y):
        g, f, d1 = drive_eval(kind, c, t)
        v = y.reshape(4, 2)
        z = v[:, 0] + 1j * v[:, 1]
        fe = complex(f * cphi, f * sphi)
        ik = 1j * kap
        dz = np.array([
            (-g1 + 1j * d1) * z[0] + g * z[1] + ik * z[2],
            g * z[0] + (-g1 - 1j * d1) * z[1] - ik * z[3],
            ik * z[0] + (-g2 + 1j * d2) * z[2] + fe * z[3],
            -ik * z[1] + fe.conjugate() * z[2] + (-g2 - 1j * d2) * z[3],
        ])
        return np.column_stack([dz.real, dz.imag]).ravel()

    samples = np.full((n_win + 1, 8), np.nan)
    lognorm = np.full(n_win, np.nan)
    y0 = np.asarray(v0, float).copy()
    nrm = math.sqrt(float(np.dot(y0, y0)))
    if nrm > 0.0:
        y0 /= nrm
    samples[0] = y0
    stepper = _AdaptiveStepper(rhs, t0, y0, rtol, atol, max_steps)
    status = STATUS_OK
    n_done = 0
    dt_win = (t1 - t0) / n_win
    for i in range(1, n_win + 1):
        status = stepper.advance_to(t0 + i * dt_win)
        if status != STATUS_OK:
            break
        nrm = math.sqrt(float(np.dot(stepper.y, stepper.y)))
        lognorm[i - 1] = math.log(nrm) if nrm > 0.0 else -math.inf
        if nrm > 0.0:
            stepper.y = stepper.y / nrm
            if stepper.k1 is not None:
                stepper.k1 = stepper.k1 / nrm  # FSAL slot scales with the state
        samples[i] = stepper.y
        n_done = i
    return samples, lognorm, stepper.nsteps, stepper.nrejected, status, n_done


def euler_maruyama(q, cex, ci, dt, dw_ex, dw_i, y_out):
    """Euler-Maruyama recursion for dv = Q v dt + cex dW_ex + ci dW_i.

    Fills ``y_out[k] = cex * v_k - dW_ex[k] / dt`` (the out-coupled field by
    the input-output relation, with the white input reconstructed from the
    same increments driving the cavity).  v starts at 0.
    """
    q = np.asarray(q, float)
    p = np.eye(4) + dt * q
    drive = cex * dw_ex + ci * dw_i
    inv_dt = 1.0 / dt
    v = np.zeros(4)
    n = dw_ex.shape[0]
    for k in range(n):
        y_out[k] = cex * v - dw_ex[k] * inv_dt
        v = p @ v + drive[k]
    return None
