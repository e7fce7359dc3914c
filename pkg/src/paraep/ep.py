"""Exceptional-point location, order diagnostics and perturbation scaling.

The pump family is f = m g with resonator-2 on resonance (delta2 = 0); m = 1
gives the pairwise second-order EP at g = kappa, while detuned families
(m > 1) host genuine fourth-order EPs.  The characteristic polynomial of the
shifted field-basis matrix is biquadratic in this family, which yields a
closed-form coalescence point used as a cross-check on the numerical search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import SearchError, ValidationError
from .model import SystemParams, matrix_field_basis, matrix_nondegenerate
from .spectral import eig_dense

__all__ = [
    "CoalescenceMetrics",
    "EPLocation",
    "coalescence_metrics",
    "find_ep2",
    "find_ep4",
    "ep4_family_point",
    "scaling_exponent",
    "ScalingFit",
]


@dataclass(frozen=True)
class CoalescenceMetrics:
    """Diagnostics of a candidate eigenvalue cluster.

    ``spread`` is the max pairwise distance inside the cluster,
    ``gram_condition`` the condition number of the cluster eigenvectors'
    Gram matrix (≈1 for a diabolical point, diverging at an EP), ``n`` the
    cluster size.
    """

    spread: float
    gram_condition: float
    n: int

    def __post_init__(self):
        if self.spread < 0.0 or self.gram_condition < 1.0 - 1e-9:
            raise ValidationError("invalid coalescence metrics")


def coalescence_metrics(m: np.ndarray, cluster_tol: float = 1e-3) -> CoalescenceMetrics:
    """Cluster the spectrum of ``m`` and report coalescence diagnostics.

    Single-linkage clustering at ``cluster_tol``; the largest cluster is
    reported.  n = 1 means no candidate degeneracy at this tolerance.
    """
    dec = eig_dense(m)
    w = dec.eigenvalues
    n = len(w)
    labels = list(range(n))
    for i in range(n):
        for j in range(i + 1, n):
            if abs(w[i] - w[j]) <= cluster_tol:
                old, new = labels[j], labels[i]
                labels = [new if l == old else l for l in labels]
    best = max(set(labels), key=lambda l: labels.count(l))
    idx = [i for i, l in enumerate(labels) if l == best]
    if len(idx) == 1:
        return CoalescenceMetrics(0.0, 1.0, 1)
    spread = max(abs(w[i] - w[j]) for i in idx for j in idx)
    vecs = dec.eigenvectors[:, idx]
    gram = vecs.conj().T @ vecs
    cond = float(np.linalg.cond(gram))
    return CoalescenceMetrics(float(spread), max(cond, 1.0), len(idx))


@dataclass(frozen=True)
class EPLocation:
    """A located exceptional point of the f = m g family."""

    g: float
    delta1: float
    m: float
    kappa: float
    gamma: float
    phi: float
    order: int
    metrics: CoalescenceMetrics

    def params(self) -> SystemParams:
        return SystemParams(gamma1=self.gamma, gamma2=self.gamma,
                            delta1=self.delta1, delta2=0.0,
                            g=self.g, f=self.m * self.g, phi=self.phi,
                            kappa=self.kappa)

    def matrix(self) -> np.ndarray:
        return matrix_field_basis(self.params())


def _re_splitting_nondeg(g, kappa, gamma, phi):
    p = SystemParams(gamma1=gamma, gamma2=gamma, g=g, f=g, phi=phi, kappa=kappa)
    w = eig_dense(matrix_nondegenerate(p)).eigenvalues
    return float(np.max(w.real) - np.min(w.real))


def find_ep2(kappa: float, gamma: float, phi: float = 0.0,
             g_tol: float = 1e-12) -> EPLocation:
    """Second-order EP of the balanced family f = g at zero detuning.

    Bisection on the spectral splitting Re(nu) -> 0; the eigenvalues and
    eigenvectors collapse in pairs at the returned point.
    """
    if kappa <= 0.0:
        raise ValidationError("find_ep2 needs kappa > 0")
    scale = max(kappa, gamma, 1e-12)
    eps = 1e-6 * scale
    lo, hi = 0.0, 2.0 * kappa + gamma
    if _re_splitting_nondeg(lo, kappa, gamma, phi) <= eps:
        raise SearchError("no splitting at g=0; cannot bracket the EP")
    while _re_splitting_nondeg(hi, kappa, gamma, phi) > eps:
        hi *= 2.0
        if hi > 1e6 * scale:
            raise SearchError("failed to bracket the EP from above")
    while hi - lo > g_tol * scale:
        mid = 0.5 * (lo + hi)
        if _re_splitting_nondeg(mid, kappa, gamma, phi) > eps:
            lo = mid
        else:
            hi = mid
    g_ep = 0.5 * (lo + hi)
    p = SystemParams(gamma1=gamma, gamma2=gamma, g=g_ep, f=g_ep, phi=phi,
                     kappa=kappa)
    metrics = coalescence_metrics(matrix_field_basis(p))
    return EPLocation(g=g_ep, delta1=0.0, m=1.0, kappa=kappa, gamma=gamma,
                      phi=phi, order=2, metrics=metrics)


def ep4_family_point(m: float, kappa: float = 1.0):
    """Closed-form fourth-order coalescence point of the f = m g family.

    With f = m g and delta2 = 0 the characteristic polynomial of the shifted
    field-basis matrix is biquadratic; demanding both coefficients vanish
    gives

        g^2     = kappa^2 [(m-1) + sqrt((m-1)^2 + m^2)] / m^3
        delta1^2 = g^2 (1 + m^2) - 2 kappa^2

    Returns (g, delta1).  m = 1 degenerates to (kappa, 0).
    """
    if m <= 0.0:
        raise ValidationError("family ratio m must be > 0")
    g2 = kappa * kappa * ((m - 1.0) + math.hypot(m - 1.0, m)) / m ** 3
    d2 = g2 * (1.0 + m * m) - 2.0 * kappa * kappa
    if d2 < -1e-12 * kappa * kappa:
        raise SearchError(f"family m={m} has no real fourth-order point")
    return math.sqrt(g2), math.sqrt(max(d2, 0.0))


def _spread4(g, d1, m, kappa, gamma, phi):
    p = SystemParams(gamma1=gamma, gamma2=gamma, delta1=d1, delta2=0.0,
                     g=abs(g), f=m * abs(g), phi=phi, kappa=kappa)
    w = eig_dense(matrix_field_basis(p)).eigenvalues
    return float(max(abs(w[i] - w[j]) for i in range(4) for j in range(i + 1, 4)))


def find_ep4(m: float, kappa: float, gamma: float, phi: float = 0.0,
             search_box=None, coarse: int = 200,
             spread_tol: float = 2e-3) -> EPLocation:
    """Fourth-order EP search over (g, delta1) for the family f = m g.

    Coarse grid scan of the full eigenvalue spread followed by Nelder-Mead
    refinement.  The spread at a defective quartic cannot drop below the
    eigensolver noise floor ~eps^(1/4); ``spread_tol`` accounts for that.
    Raises :class:`SearchError` carrying the best candidate when no
    fourth-order cluster is found inside the box.
    """
    if search_box is None:
        try:
            g_c, d_c = ep4_family_point(m, kappa)
        except SearchError:
            g_c, d_c = kappa, 0.2 * kappa
        half = 0.3 * kappa
        search_box = ((max(g_c - half, 1e-6), g_c + half),
                      (max(d_c - half, 0.0), d_c + half))
    (g_lo, g_hi), (d_lo, d_hi) = search_box

    gs = np.linspace(g_lo, g_hi, coarse)
    ds = np.linspace(d_lo, d_hi, coarse)
    best = (np.inf, g_lo, d_lo)
    for g in gs:
        for d in ds:
            s = _spread4(g, d, m, kappa, gamma, phi)
            if s < best[0]:
                best = (s, g, d)

    res = minimize(lambda x: _spread4(x[0], x[1], m, kappa, gamma, phi),
                   x0=[best[1], best[2]], method="Nelder-Mead",
                   bounds=[(g_lo, g_hi), (d_lo, d_hi)],
                   options={"xatol": 1e-13, "fatol": 1e-15, "maxiter": 2000})
    g_ep, d_ep = float(abs(res.x[0])), float(res.x[1])
    spread = _spread4(g_ep, d_ep, m, kappa, gamma, phi)
    scale = max(kappa, gamma, 1.0)
    p = SystemParams(gamma1=gamma, gamma2=gamma, delta1=d_ep, delta2=0.0,
                     g=g_ep, f=m * g_ep, phi=phi, kappa=kappa)
    metrics = coalescence_metrics(matrix_field_basis(p), cluster_tol=10 * spread_tol)
    loc = EPLocation(g=g_ep, delta1=d_ep, m=m, kappa=kappa, gamma=gamma,
                     phi=phi, order=4, metrics=metrics)
    if spread > spread_tol * scale or metrics.n < 4:
        err = SearchError(
            f"no fourth-order cluster in box (best spread {spread:.3e})")
        err.best = loc
        raise err
    return loc


@dataclass(frozen=True)
class ScalingFit:
    """Log-log fit of splitting versus detuning perturbation."""

    exponent: float
    r_squared: float
    deltas: np.ndarray
    splittings: np.ndarray


def _sideband_splitting(p: SystemParams) -> float:
    """Spread of the spectral-splitting axis: the lambda_R values are the
    imaginary parts of the field-basis spectrum (real parts in the printed
    sideband frame)."""
    w = eig_dense(matrix_field_basis(p)).eigenvalues
    return float(np.max(w.imag) - np.min(w.imag))


def scaling_exponent(ep: EPLocation, deltas=None,
                     noise_floor: float = 1e-7) -> ScalingFit:
    """Fit delta Re(lambda) ~ (delta Delta)^(1/n) near an EP.

    The response is the change of the spectral splitting (sideband-frame real
    parts) under delta1 -> delta1 + delta.  Points whose response falls below
    ``noise_floor`` are dropped; fewer than 4 usable points is an error.
    """
    if deltas is None:
        deltas = np.logspace(-6, -3, 13)
    deltas = np.asarray(deltas, dtype=float)
    if np.any(deltas <= 0.0):
        raise ValidationError("perturbations must be positive")
    base = ep.params()
    s0 = _sideband_splitting(base)
    splits = []
    used = []
    for d in deltas:
        s = abs(_sideband_splitting(base.with_(delta1=ep.delta1 + d)) - s0)
        if s > noise_floor:
            used.append(d)
            splits.append(s)
    if len(used) < 4:
        raise SearchError("fewer than 4 usable perturbation points above noise")
    x = np.log(np.asarray(used))
    y = np.log(np.asarray(splits))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return ScalingFit(float(slope), r2, np.asarray(used), np.asarray(splits))
