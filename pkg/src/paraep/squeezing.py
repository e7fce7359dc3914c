"""Below-threshold output-quadrature noise spectra near the EP.

Linearized input-output treatment: each resonator loses at rate gamma split
into an out-coupled share gamma_ex = rho*gamma and an intrinsic share
gamma_i = (1-rho)*gamma, both fed by independent vacuum inputs normalized so
every quadrature's vacuum spectrum is 1 (standard noise limit).  With
chi(W) = (-iW I - Q)^(-1) the symmetrized output spectral matrix is

    S(W) = (2 g_ex chi - I)(2 g_ex chi - I)^dag + 4 g_ex g_i chi chi^dag

in the (X1, Y1, X2, Y2) basis; its real part is what real quadrature mixing
angles can observe and is what this module returns.  A seeded Euler-Maruyama
simulation of the same Langevin system provides an independent estimate of
the spectra for cross-checking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import welch

from . import _kernels
from .errors import AboveThresholdError, IntegrationError, ValidationError
from .model import SystemParams, matrix_quadrature

__all__ = [
    "loss_partition",
    "output_psd",
    "SqueezingSpectrum",
    "squeezing_spectrum",
    "optimal_quadrature",
    "McSpectra",
    "langevin_mc",
]


def loss_partition(p: SystemParams):
    """(gamma_ex, gamma_i): out-coupling and intrinsic share of the loss."""
    return p.rho * p.gamma1, (1.0 - p.rho) * p.gamma1


def _stable_quadrature_matrix(p: SystemParams) -> np.ndarray:
    q = matrix_quadrature(p)
    if float(np.max(np.linalg.eigvals(q).real)) >= 0.0:
        raise AboveThresholdError(
            "output spectra require a below-threshold working point "
            "(max Re eig(Q) < 0)")
    return q


def output_psd(p: SystemParams, omega: float) -> np.ndarray:
    """Symmetrized output spectral matrix at sideband frequency ``omega``.

    Vacuum inputs give S = I for passive cavities; S -> I as omega -> inf.
    """
    q = _stable_quadrature_matrix(p)
    return _psd_from_q(q, p, omega)


def _psd_from_q(q, p, omega):
    g_ex, g_i = loss_partition(p)
    chi = np.linalg.inv(-1j * omega * np.eye(4) - q)
    a = 2.0 * g_ex * chi - np.eye(4)
    s = a @ a.conj().T + 4.0 * g_ex * g_i * (chi @ chi.conj().T)
    return s.real


def _port_block(s, port):
    if port not in (0, 1):
        raise ValidationError("port must be 0 (resonator 1) or 1 (resonator 2)")
    i = 2 * port
    return s[i:i + 2, i:i + 2]


def _block_minmax(b):
    """Min/max of the quadrature form and the minimizing angle in [0, pi)."""
    bs = 0.5 * (b + b.T)
    w, v = np.linalg.eigh(bs)
    theta = math.atan2(v[1, 0], v[0, 0]) % math.pi
    return float(w[0]), float(w[1]), theta


@dataclass(frozen=True)
class SqueezingSpectrum:
    """Noise power S(W, theta) of one output port, vacuum = 1.

    theta_star minimizes S at each frequency; s_min/s_max are the extremal
    powers over the quadrature angle (conjugate pair theta*, theta* + pi/2).
    """

    port: int
    omegas: np.ndarray
    thetas: np.ndarray
    power: np.ndarray        # shape (len(omegas), len(thetas))
    theta_star: np.ndarray
    s_min: np.ndarray
    s_max: np.ndarray

    def __post_init__(self):
        if np.any(self.power < -1e-12):
            raise ValidationError("noise powers must be nonnegative")

    @property
    def best(self):
        """(omega, theta*, S) at the global minimum over the grid."""
        i = int(np.argmin(self.s_min))
        return float(self.omegas[i]), float(self.theta_star[i]), float(self.s_min[i])


def squeezing_spectrum(p: SystemParams, port: int = 0, omegas=None,
                       thetas=None) -> SqueezingSpectrum:
    """S(W, theta) for one port over frequency and quadrature-angle grids."""
    if omegas is None:
        omegas = np.linspace(0.0, 3.0, 301)
    if thetas is None:
        thetas = np.linspace(0.0, math.pi, 181)
    omegas = np.asarray(omegas, dtype=float)
    thetas = np.asarray(thetas, dtype=float)
    q = _stable_quadrature_matrix(p)
    ct, st = np.cos(thetas), np.sin(thetas)
    power = np.empty((len(omegas), len(thetas)))
    theta_star = np.empty(len(omegas))
    s_min = np.empty(len(omegas))
    s_max = np.empty(len(omegas))
    for i, w in enumerate(omegas):
        b = _port_block(_psd_from_q(q, p, w), port)
        power[i] = (b[0, 0] * ct * ct + b[1, 1] * st * st
                    + (b[0, 1] + b[1, 0]) * ct * st)
        s_min[i], s_max[i], theta_star[i] = _block_minmax(b)
    return SqueezingSpectrum(port, omegas, thetas, power, theta_star, s_min, s_max)


def optimal_quadrature(p: SystemParams, omega: float, port: int = 0):
    """(theta*, S_min): analytic minimum over the quadrature angle."""
    b = _port_block(output_psd(p, omega), port)
    lo, _, theta = _block_minmax(b)
    return theta, lo


@dataclass(frozen=True)
class McSpectra:
    """Welch-averaged output spectra from the Langevin simulation."""

    omegas: np.ndarray
    power: dict            # (port, theta) -> PSD array over omegas
    dt: float
    ensemble: int
    seed: int

    def quadrature(self, port: int, theta: float) -> np.ndarray:
        return self.power[(port, theta)]


_DEFAULT_QUADS = ((0, 0.0), (0, math.pi / 2.0), (1, 0.0), (1, math.pi / 2.0))


def langevin_mc(p: SystemParams, seed: int = 0, duration: float = 3000.0,
                dt: float | None = None, ensemble: int = 200,
                quadratures=_DEFAULT_QUADS, nperseg: int = 65536,
                burn_in: float = 50.0, omega_max: float | None = None) -> McSpectra:
    """Euler-Maruyama estimate of the output quadrature spectra.

    dv = Q v dt + sqrt(2 g_ex) dW_ex + sqrt(2 g_i) dW_i with unit-spectrum
    vacuum increments; the out-coupled record is
    y = sqrt(2 g_ex) v - dW_ex/dt.  Per-member noise streams derive from
    ``seed`` (SeedSequence spawning), so results are reproducible and
    independent of scheduling.  dt must resolve the fastest rate:
    dt <= 0.01 / max(gamma, g, f, kappa).
    """
    q = _stable_quadrature_matrix(p)
    g_ex, g_i = loss_partition(p)
    rate = max(p.gamma1, p.g, p.f, p.kappa, 1e-12)
    if dt is None:
        dt = 0.005 / rate
    if dt > 0.01 / rate:
        raise ValidationError(f"dt={dt} too coarse; need dt <= {0.01 / rate:.3g}")
    if ensemble < 1:
        raise ValidationError("ensemble must be >= 1")
    n_burn = int(round(burn_in / dt))
    n_rec = int(round(duration / dt))
    if n_rec < 2 * nperseg:
        raise ValidationError("duration too short for the requested segment length")
    n_tot = n_burn + n_rec
    cex, ci = math.sqrt(2.0 * g_ex), math.sqrt(2.0 * g_i)
    sqdt = math.sqrt(dt)
    quads = [(int(port), float(theta)) for port, theta in quadratures]
    selectors = {}
    for port, theta in quads:
        u = np.zeros(4)
        u[2 * port] = math.cos(theta)
        u[2 * port + 1] = math.sin(theta)
        selectors[(port, theta)] = u

    keys = list(selectors)
    u_mat = np.stack([selectors[k] for k in keys])  # (n_quads, 4)
    acc = None
    children = np.random.SeedSequence(seed).spawn(ensemble)
    for child in children:
        rng = np.random.default_rng(child)
        dw_ex = rng.normal(0.0, sqdt, (n_tot, 4))
        dw_i = rng.normal(0.0, sqdt, (n_tot, 4))
        y = np.empty((n_tot, 4))
        _kernels.backend.euler_maruyama(q, cex, ci, dt, dw_ex, dw_i, y)
        y = y[n_burn:]
        if not np.all(np.isfinite(y)):
            raise IntegrationError("unstable Langevin discretization (blow-up)")
        series = y @ u_mat.T  # (n_rec, n_quads)
        f, pxx = welch(series.T, fs=1.0 / dt, nperseg=nperseg,
                       noverlap=nperseg // 2, window="hann", detrend=False,
                       return_onesided=False, scaling="density", axis=-1)
        acc = pxx if acc is None else acc + pxx
    acc = {k: acc[i] for i, k in enumerate(keys)}

    omegas = 2.0 * math.pi * f
    keep = omegas >= 0.0
    if omega_max is not None:
        keep &= omegas <= omega_max
    order = np.argsort(omegas[keep])
    power = {k: (v[keep][order] / ensemble) for k, v in acc.items()}
    return McSpectra(omegas[keep][order], power, dt, ensemble, seed)
