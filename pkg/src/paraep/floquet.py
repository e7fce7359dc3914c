"""Floquet analysis of modulated pumps and dynamic EP encirclement.

The periodically modulated linear system is the quadrature generator with
g(t) = g0 + F sin(wt); following the balanced-pump family both parametric
gains track the modulation (``tie_f_to_g``), which keeps the generator real
and the exponent branches in conjugate pairs.

Encirclement transports a state of the linearized field-basis system around
a closed (gain, detuning) loop; the state is renormalized window by window
so only mode content is tracked.  Because the instantaneous spectrum on the
weak-pump arc consists of equal-gain conjugate pairs, the loop is started
there (default start angle 2pi/3) and the outcome is judged at the
frequency-sheet level: the final dominant mode either shares the starting
mode's (growth, |splitting|) pair or it does not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._drive import encode_drive
from .errors import IntegrationError, ValidationError
from .model import (AmplitudeModulated, EncirclementLoop, SystemParams,
                    matrix_field_basis, matrix_quadrature)
from .sweep import parallel_map

__all__ = [
    "MonodromyResult",
    "EncirclementResult",
    "FepSweep",
    "monodromy",
    "find_fep",
    "fep_sweep",
    "encircle",
    "chirality",
]

_MAX_STEPS = 50_000_000


@dataclass(frozen=True)
class MonodromyResult:
    """One-period state-transition matrix and its Floquet exponents.

    Exponents mu_k = log(eig Phi)/T with Im folded into (-w/2, w/2], sorted
    by (Re desc, Im desc).  det Phi is checked against the Liouville formula
    exp(integral of tr Q) = exp(-4 gamma T).
    """

    phi_matrix: np.ndarray
    period: float
    exponents: np.ndarray

    @property
    def max_growth(self) -> float:
        return float(self.exponents[0].real)

    @property
    def re_splitting(self) -> float:
        re = self.exponents.real
        return float(re.max() - re.min())


def quadrature_transfer(p: SystemParams, d: AmplitudeModulated, t0: float,
                        t1: float, tie_f_to_g: bool = True,
                        rtol: float = 1e-12, atol: float = 1e-14) -> np.ndarray:
    """State-transition matrix of dv/dt = Q(t) v from t0 to t1."""
    matrix_quadrature(p)  # enforce the symmetric zero-detuning preconditions
    kind, c = encode_drive(d, p, tie_f_to_g=tie_f_to_g)
    m, nsteps, nrej, status = _kernels.backend.propagate_quadrature(
        p.gamma1, p.kappa, math.cos(p.phi), math.sin(p.phi), kind, c,
        np.eye(4), t0, t1, rtol, atol, _MAX_STEPS)
    if status != _kernels.STATUS_OK:
        raise IntegrationError("quadrature transfer-matrix integration failed")
    return m


def monodromy(p: SystemParams, d: AmplitudeModulated, tie_f_to_g: bool = True,
              rtol: float = 1e-12, atol: float = 1e-14,
              t_start: float = 0.0) -> MonodromyResult:
    """Integrate dPhi/dt = Q(t) Phi over one modulation period.

    ``tie_f_to_g`` keeps f(t) = g(t) (balanced pumps); otherwise f stays at
    its static value.  The Floquet exponents do not depend on ``t_start``.
    """
    period = 2.0 * math.pi / d.omega
    m = quadrature_transfer(p, d, t_start, t_start + period,
                            tie_f_to_g=tie_f_to_g, rtol=rtol, atol=atol)
    ev = np.linalg.eigvals(m)
    mu = np.log(np.abs(ev)) / period + 1j * (np.angle(ev) / period)
    # fold Im into (-w/2, w/2]
    im = np.mod(mu.imag + 0.5 * d.omega, d.omega) - 0.5 * d.omega
    im[im <= -0.5 * d.omega + 1e-15 * d.omega] += d.omega
    mu = mu.real + 1j * im
    order = np.lexsort((-mu.imag, -np.round(mu.real, 12)))
    mu = mu[order]

    det = float(np.linalg.det(m))
    det_ref = math.exp(-4.0 * p.gamma1 * period)
    if abs(det - det_ref) > 1e-6 * max(det_ref, 1e-300):
        raise IntegrationError(
            f"Liouville check failed: det Phi = {det:.6e}, expected {det_ref:.6e}")
    return MonodromyResult(m, period, mu)


def find_fep(p: SystemParams, F: float, omega: float, g0_lo: float,
             g0_hi: float, tie_f_to_g: bool = True, g_tol: float = 1e-9,
             prescan: int = 80):
    """Locate the Floquet EP: the g0 where the exponents' real splitting opens.

    Scans [g0_lo, g0_hi] for the first transition of the real-part splitting
    through ``eps`` and refines it by bisection.  Returns None when the
    splitting never opens in range.
    """
    eps = 1e-7 * max(1.0, p.kappa)

    def split(g0):
        return monodromy(p, AmplitudeModulated(g0=g0, F=F, omega=omega),
                         tie_f_to_g=tie_f_to_g).re_splitting

    gs = np.linspace(g0_lo, g0_hi, prescan)
    vals = [split(g) for g in gs]
    bracket = None
    for i in range(prescan - 1):
        if vals[i] <= eps < vals[i + 1]:
            bracket = (gs[i], gs[i + 1])
            break
    if bracket is None:
        return None
    lo, hi = bracket
    while hi - lo > g_tol:
        mid = 0.5 * (lo + hi)
        if split(mid) > eps:
            hi = mid
        else:
            lo = mid
    return float(0.5 * (lo + hi))


@dataclass(frozen=True)
class FepSweep:
    """Floquet-exponent maps over (F, g0) plus the F-EP locus."""

    F_values: np.ndarray
    g0_values: np.ndarray
    gain: np.ndarray            # max Re mu + gamma
    splitting: np.ndarray       # Re-part spread
    below_threshold: np.ndarray
    failed: np.ndarray
    locus: tuple                # (F, g0_fep-or-nan) pairs


def fep_sweep(p: SystemParams, F_values, g0_values, omega: float,
              tie_f_to_g: bool = True) -> FepSweep:
    """Per-(F, g0) Floquet exponents with the F-EP locus per modulation depth."""
    F_values = np.asarray(F_values, dtype=float)
    g0_values = np.asarray(g0_values, dtype=float)

    def cell(idx):
        i, j = idx
        try:
            res = monodromy(p, AmplitudeModulated(g0=g0_values[j],
                                                  F=F_values[i], omega=omega),
                            tie_f_to_g=tie_f_to_g)
        except IntegrationError:
            return None
        return res.max_growth, res.re_splitting

    cells = [(i, j) for i in range(len(F_values)) for j in range(len(g0_values))]
    out = parallel_map(cell, cells)
    shape = (len(F_values), len(g0_values))
    gain = np.full(shape, np.nan)
    splitting = np.full(shape, np.nan)
    below = np.zeros(shape, dtype=bool)
    failed = np.zeros(shape, dtype=bool)
    for (i, j), r in zip(cells, out):
        if r is None:
            failed[i, j] = True
            continue
        growth, split = r
        gain[i, j] = growth + p.gamma1
        splitting[i, j] = split
        below[i, j] = growth < 0.0

    lo, hi = float(g0_values.min()), float(g0_values.max())
    locus = []
    for F in F_values:
        g_ep = find_fep(p, float(F), omega, lo, hi, tie_f_to_g=tie_f_to_g)
        locus.append((float(F), math.nan if g_ep is None else g_ep))
    locus = tuple(locus)
    return FepSweep(F_values, g0_values, gain, splitting, below, failed, locus)


@dataclass(frozen=True)
class EncirclementResult:
    """Outcome of one adiabatic loop around (or beside) the static EP.

    ``projections[k]`` holds the unit-normalized magnitudes of the state's
    coefficients on the instantaneous eigenbasis at sample k.
    ``returns_to_start`` compares frequency sheets: True when the final
    dominant mode lies in the same (growth, |splitting|) pair as the start
    mode.
    """

    direction: str
    start_mode: int
    final_mode: int
    returns_to_start: bool
    angles: np.ndarray
    projections: np.ndarray
    start_eigenvalues: np.ndarray


def _ordered_modes(mat):
    w, v = np.linalg.eig(mat)
    order = np.lexsort((-w.imag, -np.round(w.real, 9)))
    w = w[order]
    v = v[:, order] / np.linalg.norm(v[:, order], axis=0)
    return w, v


def _sheet_of(w, idx, tol):
    return {i for i in range(len(w))
            if abs(w[i].real - w[idx].real) <= tol
            and abs(abs(w[i].imag) - abs(w[idx].imag)) <= tol}


def encircle(p: SystemParams, r: float, omega: float, direction: str = "ccw",
             start_mode: int = 0, g0: float | None = None,
             start_angle: float = 2.0 * math.pi / 3.0, n_windows: int = 1024,
             rtol: float = 1e-11, atol: float = 1e-13) -> EncirclementResult:
    """Transport an instantaneous eigenmode once around the parameter loop.

    The loop is f = g = g0 + r cos(chi), delta1 = r sin(chi) traversed from
    ``start_angle`` (chi advances counterclockwise or clockwise with
    ``direction``); g0 defaults to kappa, the static EP.  The start point
    must have a non-degenerate instantaneous eigenbasis, which rules out the
    zero-detuning axis (chi = 0 or pi).
    """
    if g0 is None:
        g0 = p.kappa
    loop = EncirclementLoop(g0=float(g0), r=float(r), omega=float(omega),
                            direction=direction)
    loop.validate()
    period = 2.0 * math.pi / loop.omega
    chi0 = float(start_angle) % (2.0 * math.pi)
    t0 = (chi0 if loop.sign > 0 else (2.0 * math.pi - chi0)) / loop.omega

    g_start = loop.g0 + loop.r * math.cos(chi0)
    d1_start = loop.r * math.sin(chi0)
    p_start = p.with_(g=g_start, f=g_start, delta1=d1_start)
    w0, v0 = _ordered_modes(matrix_field_basis(p_start))
    scale = max(1.0, float(np.max(np.abs(w0))))
    gap = min(abs(w0[i] - w0[j]) for i in range(4) for j in range(i + 1, 4))
    if gap < 1e-6 * scale:
        raise ValidationError(
            "degenerate instantaneous eigenbasis at the start point; "
            "choose a start angle off the zero-detuning axis")
    if not 0 <= start_mode < 4:
        raise ValidationError("start_mode must be in 0..3")

    vec = v0[:, start_mode]
    packed = np.empty(8)
    packed[0::2] = vec.real
    packed[1::2] = vec.imag
    kind, c = encode_drive(loop, p)
    pars = (p.gamma1, p.gamma2, p.delta2, p.kappa,
            math.cos(p.phi), math.sin(p.phi))
    samples, lognorm, nsteps, nrej, status, n_done = \
        _kernels.backend.propagate_field_linear(
            pars, kind, c, packed, t0, t0 + period, n_windows, rtol, atol,
            _MAX_STEPS)
    if status != _kernels.STATUS_OK:
        raise IntegrationError("encirclement transport failed")

    angles = chi0 + loop.sign * np.linspace(0.0, 2.0 * math.pi, n_windows + 1)
    projections = np.empty((n_windows + 1, 4))
    for k in range(n_windows + 1):
        chi = angles[k]
        g = loop.g0 + loop.r * math.cos(chi)
        pk = p.with_(g=g, f=g, delta1=loop.r * math.sin(chi))
        wk, vk = _ordered_modes(matrix_field_basis(pk))
        z = samples[k, 0::2] + 1j * samples[k, 1::2]
        coeff = np.linalg.solve(vk, z)
        mag = np.abs(coeff)
        nrm = np.linalg.norm(mag)
        projections[k] = mag / nrm if nrm > 0 else mag

    final_mode = int(np.argmax(projections[-1]))
    sheet = _sheet_of(w0, start_mode, 1e-6 * scale)
    return EncirclementResult(direction=loop.direction, start_mode=start_mode,
                              final_mode=final_mode,
                              returns_to_start=final_mode in sheet,
                              angles=angles, projections=projections,
                              start_eigenvalues=w0)


def chirality(p: SystemParams, r: float, omega: float, start_mode: int = 0,
              g0: float | None = None, **kwargs):
    """Run both loop directions; chiral when their verdicts differ."""
    ccw = encircle(p, r, omega, "ccw", start_mode, g0, **kwargs)
    cw = encircle(p, r, omega, "cw", start_mode, g0, **kwargs)
    return ccw, cw, ccw.returns_to_start != cw.returns_to_start
