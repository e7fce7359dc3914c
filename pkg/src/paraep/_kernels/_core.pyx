# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels: adaptive Dormand-Prince 5(4) propagators for the
coupled-mode, quadrature-Floquet and linear field systems, plus the
Euler-Maruyama Langevin recursion.

Mirrors the pure-Python reference in ``_ref`` step for step (same tableau,
same step control, same output clamping) so the two backends agree to
rounding error.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, fabs, isfinite, log, pow, sin, sqrt

cnp.import_array()

BACKEND_NAME = "compiled"

DRIVE_CONSTANT = 0
DRIVE_AM = 1
DRIVE_LOOP = 2

STATUS_OK = 0
STATUS_STEP_UNDERFLOW = 1
STATUS_MAX_STEPS = 2

cdef enum:
    K_CONSTANT = 0
    K_AM = 1
    K_LOOP = 2
    ST_OK = 0
    ST_UNDERFLOW = 1
    ST_MAX_STEPS = 2

DEF MAXDIM = 16

cdef double SAFETY = 0.9
cdef double FAC_MIN = 0.2
cdef double FAC_MAX = 5.0
cdef double EPS = 2.220446049250313e-16

# Dormand-Prince 5(4) tableau (row-packed lower triangle).
cdef double C2 = 1.0 / 5.0, C3 = 3.0 / 10.0, C4 = 4.0 / 5.0, C5 = 8.0 / 9.0
cdef double A21 = 1.0 / 5.0
cdef double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0
cdef double A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0, A63 = 46732.0 / 5247.0
cdef double A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0
cdef double A71 = 35.0 / 384.0, A73 = 500.0 / 1113.0, A74 = 125.0 / 192.0
cdef double A75 = -2187.0 / 6784.0, A76 = 11.0 / 84.0
cdef double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0
cdef double E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0

cdef int SYS_FIELDS = 0
cdef int SYS_QUAD = 1
cdef int SYS_LINFIELD = 2


cdef inline void drive_eval(int kind, const double* c, double t,
                            double* g, double* f, double* d1) noexcept nogil:
    cdef double phase
    if kind == K_CONSTANT:
        g[0] = c[0]; f[0] = c[1]; d1[0] = c[2]
    elif kind == K_AM:
        g[0] = c[0] + c[1] * sin(c[2] * t)
        f[0] = g[0] if c[5] != 0.0 else c[3]
        d1[0] = c[4]
    else:
        phase = c[2] * t
        g[0] = c[0] + c[1] * cos(phase)
        f[0] = g[0]
        d1[0] = c[1] * sin(phase)


cdef void rhs_eval(int sys_kind, int dim, const double* pars,
                   int dkind, const double* c, double t,
                   const double* y, double* out) noexcept nogil:
    cdef double g, f, d1
    cdef double ar, ai, br, bi, na, nb, fer, fei
    cdef double q[4][4]
    cdef int i, j, mm
    cdef double acc
    drive_eval(dkind, c, t, &g, &f, &d1)
    if sys_kind == SYS_FIELDS:
        # pars = (gamma1, gamma2, delta2, gs1, gs2, kappa, cos_phi, sin_phi)
        ar = y[0]; ai = y[1]; br = y[2]; bi = y[3]
        na = ar * ar + ai * ai
        nb = br * br + bi * bi
        fer = f * pars[6]; fei = f * pars[7]
        out[0] = (-pars[0] - pars[3] * na) * ar - d1 * ai + g * ar - pars[5] * bi
        out[1] = (-pars[0] - pars[3] * na) * ai + d1 * ar - g * ai + pars[5] * br
        out[2] = (-pars[1] - pars[4] * nb) * br - pars[2] * bi + fer * br + fei * bi - pars[5] * ai
        out[3] = (-pars[1] - pars[4] * nb) * bi + pars[2] * br + fei * br - fer * bi + pars[5] * ar
    elif sys_kind == SYS_QUAD:
        # pars = (gamma, kappa, cos_phi, sin_phi); y is a row-major 4x4 matrix
        q[0][0] = -pars[0] + g; q[0][1] = 0.0; q[0][2] = 0.0; q[0][3] = -pars[1]
        q[1][0] = 0.0; q[1][1] = -pars[0] - g; q[1][2] = pars[1]; q[1][3] = 0.0
        q[2][0] = 0.0; q[2][1] = -pars[1]
        q[2][2] = -pars[0] + f * pars[2]; q[2][3] = f * pars[3]
        q[3][0] = pars[1]; q[3][1] = 0.0
        q[3][2] = f * pars[3]; q[3][3] = -pars[0] - f * pars[2]
        for i in range(4):
            for j in range(4):
                acc = 0.0
                for mm in range(4):
                    acc += q[i][mm] * y[4 * mm + j]
                out[4 * i + j] = acc
    else:
        # pars = (gamma1, gamma2, delta2, kappa, cos_phi, sin_phi)
        # y packs (a, a*, b, b*) as interleaved re/im pairs
        fer = f * pars[4]; fei = f * pars[5]
        # d a/dt
        out[0] = -pars[0] * y[0] - d1 * y[1] + g * y[2] - pars[3] * y[5]
        out[1] = -pars[0] * y[1] + d1 * y[0] + g * y[3] + pars[3] * y[4]
        # d a*/dt
        out[2] = g * y[0] - pars[0] * y[2] + d1 * y[3] + pars[3] * y[7]
        out[3] = g * y[1] - pars[0] * y[3] - d1 * y[2] - pars[3] * y[6]
        # d b/dt
        out[4] = -pars[3] * y[1] - pars[1] * y[4] - pars[2] * y[5] + fer * y[6] - fei * y[7]
        out[5] = pars[3] * y[0] - pars[1] * y[5] + pars[2] * y[4] + fer * y[7] + fei * y[6]
        # d b*/dt
        out[6] = pars[3] * y[3] + fer * y[4] + fei * y[5] - pars[1] * y[6] + pars[2] * y[7]
        out[7] = -pars[3] * y[2] - fei * y[4] + fer * y[5] - pars[1] * y[7] - pars[2] * y[6]


cdef struct StepState:
    double t
    double h
    double err_last
    long nsteps
    long nrejected
    int has_fsal
    double y[MAXDIM]
    double k1[MAXDIM]


cdef int advance_to(StepState* st, double t_end, int sys_kind, int dim,
                    const double* pars, int dkind, const double* c,
                    double rtol, double atol, long max_steps) noexcept nogil:
    cdef double k2[MAXDIM]
    cdef double k3[MAXDIM]
    cdef double k4[MAXDIM]
    cdef double k5[MAXDIM]
    cdef double k6[MAXDIM]
    cdef double k7[MAXDIM]
    cdef double ytmp[MAXDIM]
    cdef double ynew[MAXDIM]
    cdef double h, hmin, err, sc, r, fac, e
    cdef int i, just_rejected = 0
    if not st.has_fsal:
        rhs_eval(sys_kind, dim, pars, dkind, c, st.t, st.y, st.k1)
        st.has_fsal = 1
    if st.h <= 0.0:
        st.h = fabs(t_end - st.t) * 1e-3
        if st.h < 1e-8:
            st.h = 1e-8
    while st.t < t_end:
        if st.nsteps >= max_steps:
            return ST_MAX_STEPS
        h = st.h
        if h > t_end - st.t:
            h = t_end - st.t
        hmin = 16.0 * EPS * (fabs(st.t) if fabs(st.t) > 1.0 else 1.0)
        if h < hmin:
            return ST_UNDERFLOW
        for i in range(dim):
            ytmp[i] = st.y[i] + h * (A21 * st.k1[i])
        rhs_eval(sys_kind, dim, pars, dkind, c, st.t + C2 * h, ytmp, k2)
        for i in range(dim):
            ytmp[i] = st.y[i] + h * (A31 * st.k1[i] + A32 * k2[i])
        rhs_eval(sys_kind, dim, pars, dkind, c, st.t + C3 * h, ytmp, k3)
        for i in range(dim):
            ytmp[i] = st.y[i] + h * (A41 * st.k1[i] + A42 * k2[i] + A43 * k3[i])
        rhs_eval(sys_kind, dim, pars, dkind, c, st.t + C4 * h, ytmp, k4)
        for i in range(dim):
            ytmp[i] = st.y[i] + h * (A51 * st.k1[i] + A52 * k2[i] + A53 * k3[i]
                                     + A54 * k4[i])
        rhs_eval(sys_kind, dim, pars, dkind, c, st.t + C5 * h, ytmp, k5)
        for i in range(dim):
            ytmp[i] = st.y[i] + h * (A61 * st.k1[i] + A62 * k2[i] + A63 * k3[i]
                                     + A64 * k4[i] + A65 * k5[i])
        rhs_eval(sys_kind, dim, pars, dkind, c, st.t + h, ytmp, k6)
        for i in range(dim):
            ynew[i] = st.y[i] + h * (A71 * st.k1[i] + A73 * k3[i] + A74 * k4[i]
                                     + A75 * k5[i] + A76 * k6[i])
        rhs_eval(sys_kind, dim, pars, dkind, c, st.t + h, ynew, k7)
        err = 0.0
        for i in range(dim):
            e = h * (E1 * st.k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i]
                     + E6 * k6[i] + E7 * k7[i])
            sc = fabs(st.y[i])
            if fabs(ynew[i]) > sc:
                sc = fabs(ynew[i])
            sc = atol + rtol * sc
            r = e / sc
            err += r * r
        err = sqrt(err / dim)
        if not isfinite(err):
            err = 1e308
        st.nsteps += 1
        if err <= 1.0:
            st.t += h
            for i in range(dim):
                st.y[i] = ynew[i]
                st.k1[i] = k7[i]
            st.err_last = err
            if err > 0.0:
                fac = SAFETY * pow(err, -0.2)
            else:
                fac = FAC_MAX
            if just_rejected:
                if fac > 1.0:
                    fac = 1.0
            elif fac > FAC_MAX:
                fac = FAC_MAX
            if fac < FAC_MIN:
                fac = FAC_MIN
            st.h = h * fac
            just_rejected = 0
        else:
            st.nrejected += 1
            if err < 1e308:
                fac = SAFETY * pow(err, -0.2)
            else:
                fac = FAC_MIN
            if fac < FAC_MIN:
                fac = FAC_MIN
            st.h = h * fac
            just_rejected = 1
    return ST_OK


def integrate_fields(pars, int kind, c, y0, double t0, double t1, int n_out,
                     double rtol, double atol, long max_steps):
    """See ``_ref.integrate_fields``."""
    cdef double cpars[8]
    cdef double cdrv[6]
    cdef int i
    for i in range(8):
        cpars[i] = pars[i]
    for i in range(6):
        cdrv[i] = c[i]
    cdef StepState st
    st.t = t0; st.h = 0.0; st.err_last = 0.0
    st.nsteps = 0; st.nrejected = 0; st.has_fsal = 0
    for i in range(4):
        st.y[i] = y0[i]
    out_arr = np.full((n_out + 1, 4), np.nan)
    cdef double[:, ::1] out = out_arr
    for i in range(4):
        out[0, i] = st.y[i]
    cdef int status = ST_OK, n_done = 0, j
    cdef double dt_out = (t1 - t0) / n_out
    with nogil:
        for j in range(1, n_out + 1):
            status = advance_to(&st, t0 + j * dt_out, SYS_FIELDS, 4, cpars,
                                kind, cdrv, rtol, atol, max_steps)
            if status != ST_OK:
                break
            for i in range(4):
                out[j, i] = st.y[i]
            n_done = j
    return out_arr, st.nsteps, st.nrejected, status, n_done, st.err_last


def propagate_quadrature(double gamma, double kappa, double cphi, double sphi,
                         int kind, c, m0, double t0, double t1,
                         double rtol, double atol, long max_steps):
    """See ``_ref.propagate_quadrature``."""
    cdef double cpars[4]
    cdef double cdrv[6]
    cdef int i
    cpars[0] = gamma; cpars[1] = kappa; cpars[2] = cphi; cpars[3] = sphi
    for i in range(6):
        cdrv[i] = c[i]
    m0_arr = np.ascontiguousarray(m0, dtype=float).ravel()
    cdef double[::1] m0v = m0_arr
    cdef StepState st
    st.t = t0; st.h = 0.0; st.err_last = 0.0
    st.nsteps = 0; st.nrejected = 0; st.has_fsal = 0
    for i in range(16):
        st.y[i] = m0v[i]
    cdef int status
    with nogil:
        status = advance_to(&st, t1, SYS_QUAD, 16, cpars, kind, cdrv,
                            rtol, atol, max_steps)
    out = np.empty(16)
    for i in range(16):
        out[i] = st.y[i]
    return out.reshape(4, 4), st.nsteps, st.nrejected, status


def propagate_field_linear(pars, int kind, c, v0, double t0, double t1,
                           int n_win, double rtol, double atol, long max_steps):
    """See ``_ref.propagate_field_linear``."""
    cdef double cpars[6]
    cdef double cdrv[6]
    cdef int i
    for i in range(6):
        cpars[i] = pars[i]
        cdrv[i] = c[i]
    cdef StepState st
    st.t = t0; st.h = 0.0; st.err_last = 0.0
    st.nsteps = 0; st.nrejected = 0; st.has_fsal = 0
    cdef double nrm = 0.0
    for i in range(8):
        st.y[i] = v0[i]
        nrm += st.y[i] * st.y[i]
    nrm = sqrt(nrm)
    if nrm > 0.0:
        for i in range(8):
            st.y[i] /= nrm
    samples_arr = np.full((n_win + 1, 8), np.nan)
    lognorm_arr = np.full(n_win, np.nan)
    cdef double[:, ::1] samples = samples_arr
    cdef double[::1] lognorm = lognorm_arr
    for i in range(8):
        samples[0, i] = st.y[i]
    cdef int status = ST_OK, n_done = 0, j
    cdef double dt_win = (t1 - t0) / n_win
    with nogil:
        for j in range(1, n_win + 1):
            status = advance_to(&st, t0 + j * dt_win, SYS_LINFIELD, 8, cpars,
                                kind, cdrv, rtol, atol, max_steps)
            if status != ST_OK:
                break
            nrm = 0.0
            for i in range(8):
                nrm += st.y[i] * st.y[i]
            nrm = sqrt(nrm)
            lognorm[j - 1] = log(nrm)
            if nrm > 0.0:
                for i in range(8):
                    st.y[i] /= nrm
                    st.k1[i] /= nrm  # FSAL slot scales with the state
            for i in range(8):
                samples[j, i] = st.y[i]
            n_done = j
    return samples_arr, lognorm_arr, st.nsteps, st.nrejected, status, n_done


def euler_maruyama(q, double cex, double ci, double dt, dw_ex, dw_i, y_out):
    """See ``_ref.euler_maruyama``."""
    cdef double[:, ::1] qm = np.ascontiguousarray(q, dtype=float)
    cdef double[:, ::1] ex = np.ascontiguousarray(dw_ex, dtype=float)
    cdef double[:, ::1] wi = np.ascontiguousarray(dw_i, dtype=float)
    cdef double[:, ::1] y = y_out
    cdef double p[4][4]
    cdef double v[4]
    cdef double vn[4]
    cdef int i, j
    cdef long k, n = ex.shape[0]
    cdef double inv_dt = 1.0 / dt
    for i in range(4):
        v[i] = 0.0
        for j in range(4):
            p[i][j] = dt * qm[i, j] + (1.0 if i == j else 0.0)
    with nogil:
        for k in range(n):
            for i in range(4):
                y[k, i] = cex * v[i] - ex[k, i] * inv_dt
            for i in range(4):
                vn[i] = cex * ex[k, i] + ci * wi[k, i]
                for j in range(4):
                    vn[i] += p[i][j] * v[j]
            for i in range(4):
                v[i] = vn[i]
    return None
