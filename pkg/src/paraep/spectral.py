"""Dense 4x4 eigenanalysis: decompositions, symmetry checks, growth rates
and oscillation-threshold searches.

Eigenvalues are reported sorted by (Re, Im) so downstream output files are
stable. Near defective points the decomposition keeps the residual contract
but flags eigenvector collinearity through the Gram condition number instead
of failing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EigenConvergenceError, ValidationError
from .model import SystemParams, matrix_field_basis

__all__ = [
    "EigenDecomposition",
    "ThresholdReport",
    "eig_dense",
    "check_anti_pt",
    "map_to_pt",
    "growth_rates",
    "max_growth_rate",
    "find_threshold",
    "apply_sweep",
    "PT_UNITARY",
    "ANTI_PT_PERMUTATION",
]

# Parity permutation swapping (A <-> B*) and (C <-> D*).
ANTI_PT_PERMUTATION = np.array([
    [0, 1, 0, 0],
    [1, 0, 0, 0],
    [0, 0, 0, 1],
    [0, 0, 1, 0],
], dtype=float)

# Unitary mapping the sideband matrix onto its PT-symmetric partner.
PT_UNITARY = np.array([
    [1.0, -1.0, 0.0, 0.0],
    [0.0, 0.0, 1.0, -1.0],
    [1.0, 1.0, 0.0, 0.0],
    [0.0, 0.0, 1.0, 1.0],
]) / np.sqrt(2.0)

RESIDUAL_BOUND = 1e-8


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues/eigenvectors of a 4x4 complex matrix plus diagnostics.

    eigenvalues are sorted by (Re, Im); eigenvectors (columns) have unit
    norm; residuals[i] = ||M v_i - nu_i v_i||.  ``gram_condition`` is the
    condition number of the eigenvector Gram matrix: ~1 for an orthogonal
    basis, diverging as eigenvectors coalesce.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residuals: np.ndarray
    matrix_norm: float
    gram_condition: float = field(default=1.0)

    def __post_init__(self):
        bound = RESIDUAL_BOUND * max(self.matrix_norm, 1e-300)
        worst = float(np.max(self.residuals))
        if worst > bound:
            raise EigenConvergenceError(
                f"eigen residual {worst:.3e} exceeds {bound:.3e}")


def eig_dense(m: np.ndarray) -> EigenDecomposition:
    """Full eigendecomposition of a general complex 4x4 matrix."""
    m = np.asarray(m, dtype=complex)
    if m.shape != (4, 4):
        raise ValidationError(f"expected a 4x4 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise ValidationError("matrix entries must be finite")
    try:
        w, v = np.linalg.eig(m)
    except np.linalg.LinAlgError as exc:
        raise EigenConvergenceError(f"eigensolver did not converge: {exc}") from exc
    order = np.lexsort((w.imag, w.real))
    w = w[order]
    v = v[:, order]
    v = v / np.linalg.norm(v, axis=0)
    mnorm = float(np.linalg.norm(m, 2))
    residuals = np.linalg.norm(m @ v - v * w, axis=0)
    gram = v.conj().T @ v
    gram_cond = float(np.linalg.cond(gram))
    return EigenDecomposition(w, v, residuals, mnorm, gram_cond)


def check_anti_pt(m: np.ndarray) -> float:
    """Frobenius residual ||P m* P + m||; ~0 certifies spectral anti-PT."""
    m = np.asarray(m, dtype=complex)
    p = ANTI_PT_PERMUTATION
    return float(np.linalg.norm(p @ m.conj() @ p + m, "fro"))


def map_to_pt(m: np.ndarray) -> np.ndarray:
    """Similarity U m U^dag onto the PT-symmetric partner system.

    The transform moves the phase-sensitive gain onto the diagonal: the
    positive signal/idler superposition is amplified, the negative one
    de-amplified.
    """
    m = np.asarray(m, dtype=complex)
    return PT_UNITARY @ m @ PT_UNITARY.conj().T


def growth_rates(p: SystemParams):
    """Growth/decay rates (descending) with paired |spectral splitting|.

    Returns (rates, splittings): rates are the real parts of the field-basis
    spectrum, splittings the matching |imaginary parts|.
    """
    dec = eig_dense(matrix_field_basis(p))
    order = np.argsort(-dec.eigenvalues.real)
    w = dec.eigenvalues[order]
    return w.real.copy(), np.abs(w.imag)


def max_growth_rate(p: SystemParams) -> float:
    """Largest growth rate of the linearized system (threshold when 0)."""
    return float(growth_rates(p)[0][0])


@dataclass(frozen=True)
class ThresholdReport:
    """Zero crossings of the leading growth rate along a parameter sweep.

    crossings: ordered parameter values where max growth rate crosses 0;
    rising[i] is True when the rate goes negative -> positive there.  Falling
    crossings mark oscillation self-termination windows.
    """

    variable: str
    crossings: tuple
    rising: tuple

    def __post_init__(self):
        if list(self.crossings) != sorted(self.crossings):
            raise ValidationError("crossings must be sorted")
        for a, b in zip(self.rising, self.rising[1:]):
            if a == b:
                raise ValidationError("crossing tags must alternate")

    @property
    def first_rising(self):
        for x, r in zip(self.crossings, self.rising):
            if r:
                return x
        return None


_SWEEPABLE = ("g", "f", "fg", "kappa", "gamma", "delta1", "delta2", "phi", "gs")


def apply_sweep(p: SystemParams, variable: str, value: float) -> SystemParams:
    if variable == "g":
        return p.with_(g=value)
    if variable == "f":
        return p.with_(f=value)
    if variable == "fg":  # tied pump sweep f = g
        return p.with_(g=value, f=value)
    if variable == "kappa":
        return p.with_(kappa=value)
    if variable == "gamma":
        return p.with_(gamma1=value, gamma2=value)
    if variable == "delta1":
        return p.with_(delta1=value)
    if variable == "delta2":
        return p.with_(delta2=value)
    if variable == "phi":
        return p.with_(phi=value)
    if variable == "gs":
        return p.with_(gs1=value, gs2=value)
    raise ValidationError(
        f"unknown sweep variable {variable!r}; expected one of {_SWEEPABLE}")


def find_threshold(p: SystemParams, variable: str, lo: float, hi: float,
                   tol: float = 1e-10, prescan: int = 200) -> ThresholdReport:
    """Locate every zero crossing of the leading growth rate on [lo, hi].

    A ``prescan``-point scan brackets sign changes, each refined by bisection
    to ``tol``.  The growth rate can be non-monotonic (self-termination), so
    all crossings are reported, tagged rising/falling.  An empty report is a
    valid outcome.
    """
    if not (np.isfinite(lo) and np.isfinite(hi)) or hi <= lo:
        raise ValidationError("sweep range must be finite with hi > lo")
    if prescan < 2:
        raise ValidationError("prescan must be >= 2")

    def rate(x):
        return max_growth_rate(apply_sweep(p, variable, x))

    xs = np.linspace(lo, hi, prescan)
    vals = np.array([rate(x) for x in xs])
    crossings = []
    rising = []
    for i in range(prescan - 1):
        v0, v1 = vals[i], vals[i + 1]
        if v0 == 0.0:
            # exact grid hit: tag by the neighbouring sign
            if i == 0 or vals[i - 1] < 0.0 or v1 > 0.0:
                crossings.append(float(xs[i]))
                rising.append(bool(v1 > 0.0))
            continue
        if v0 * v1 < 0.0:
            a, b, fa = xs[i], xs[i + 1], v0
            while b - a > tol:
                mid = 0.5 * (a + b)
                fm = rate(mid)
                if fm == 0.0:
                    a = b = mid
                    break
                if (fm > 0.0) == (fa > 0.0):
                    a, fa = mid, fm
                else:
                    b = mid
            crossings.append(float(0.5 * (a + b)))
            rising.append(bool(v1 > v0))
    return ThresholdReport(variable, tuple(crossings), tuple(rising))
