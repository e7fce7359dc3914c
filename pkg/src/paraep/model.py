"""Parameter/state types and the coupled-mode equations of two coupled OPOs.

Everything downstream of this module consumes the right-hand side and the
three linearizations defined here:

* ``coupled_rhs``          -- full nonlinear coupled-mode equations
* ``matrix_nondegenerate`` -- sideband-envelope eigenproblem, basis (A, B*, C, D*)
* ``matrix_quadrature``    -- real quadrature generator, basis (X1, Y1, X2, Y2)
* ``matrix_field_basis``   -- linearization around the origin in (a, a*, b, b*),
                              the only form that admits detunings and
                              asymmetric losses.

Time is dimensionless (normalized to the resonator round trip); all envelopes
are baseband relative to the half-harmonic carrier.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ValidationError

__all__ = [
    "SystemParams",
    "FieldState",
    "DriveSchedule",
    "Constant",
    "AmplitudeModulated",
    "EncirclementLoop",
    "coupled_rhs",
    "matrix_nondegenerate",
    "matrix_quadrature",
    "matrix_field_basis",
    "eval_drive",
]


def _require_finite(name, *values):
    for v in values:
        if not math.isfinite(v):
            raise ValidationError(f"{name} must be finite, got {v!r}")


@dataclass(frozen=True)
class SystemParams:
    """Static model constants of the coupled-mode equations.

    Attributes
    ----------
    gamma1, gamma2 : float
        Total field decay rate per round trip of each resonator.
    delta1, delta2 : float
        Signal detunings of each resonator.
    g : float
        Parametric gain supplied by pump 1 (phase reference).
    f : float
        Parametric gain supplied by pump 2.
    phi : float
        Relative phase of pump 2 (radians).
    gs1, gs2 : float
        Gain-saturation (back-conversion) coefficients.
    kappa : float
        Dispersive coupling rate between the resonators.
    rho : float
        Escape efficiency: out-coupled fraction of the total loss,
        ``gamma_ex = rho * gamma``. Applied identically to both resonators.
    """

    gamma1: float = 0.25
    gamma2: float = 0.25
    delta1: float = 0.0
    delta2: float = 0.0
    g: float = 0.0
    f: float = 0.0
    phi: float = 0.0
    gs1: float = 0.0
    gs2: float = 0.0
    kappa: float = 0.0
    rho: float = 1.0

    def __post_init__(self):
        _require_finite(
            "SystemParams",
            self.gamma1, self.gamma2, self.delta1, self.delta2,
            self.g, self.f, self.phi, self.gs1, self.gs2, self.kappa, self.rho,
        )
        for name in ("gamma1", "gamma2", "gs1", "gs2", "kappa", "g", "f"):
            if getattr(self, name) < 0.0:
                raise ValidationError(f"{name} must be >= 0")
        if not 0.0 <= self.rho <= 1.0:
            raise ValidationError("rho must lie in [0, 1]")

    @property
    def symmetric(self) -> bool:
        """True when both resonators share the same loss rate."""
        return self.gamma1 == self.gamma2

    def with_(self, **kwargs) -> "SystemParams":
        """Return a copy with the given fields replaced."""
        return replace(self, **kwargs)


@dataclass(frozen=True)
class FieldState:
    """Complex signal envelopes of the two resonators.

    Also used for the time derivative (da/dt, db/dt) returned by
    ``coupled_rhs``.
    """

    a: complex = 0.0 + 0.0j
    b: complex = 0.0 + 0.0j

    def __post_init__(self):
        for z in (self.a, self.b):
            z = complex(z)
            if not (math.isfinite(z.real) and math.isfinite(z.imag)):
                raise ValidationError("FieldState components must be finite")


class DriveSchedule:
    """Base class for time-dependent pump/detuning programs."""

    def validate(self):
        return None


@dataclass(frozen=True)
class Constant(DriveSchedule):
    """Static drive: instantaneous (g, f, delta1) taken from SystemParams."""


@dataclass(frozen=True)
class AmplitudeModulated(DriveSchedule):
    """Pump-1 amplitude modulation g(t) = g0 + F sin(omega t).

    f and delta1 keep their static values from SystemParams.
    """

    g0: float
    F: float
    omega: float

    def validate(self):
        _require_finite("AmplitudeModulated", self.g0, self.F, self.omega)
        if self.omega <= 0.0:
            raise ValidationError("modulation omega must be > 0")
        if self.F < 0.0:
            raise ValidationError("modulation depth F must be >= 0")


@dataclass(frozen=True)
class EncirclementLoop(DriveSchedule):
    """Closed parameter loop f = g = g0 + r cos(s w t), delta1 = r sin(s w t).

    ``direction`` is "ccw" (s = +1) or "cw" (s = -1).
    """

    g0: float
    r: float
    omega: float
    direction: str = "ccw"

    def validate(self):
        _require_finite("EncirclementLoop", self.g0, self.r, self.omega)
        if self.omega <= 0.0:
            raise ValidationError("loop omega must be > 0")
        if self.r < 0.0:
            raise ValidationError("loop radius r must be >= 0")
        if self.direction not in ("ccw", "cw"):
            raise ValidationError("direction must be 'ccw' or 'cw'")

    @property
    def sign(self) -> float:
        return 1.0 if self.direction == "ccw" else -1.0


def eval_drive(d: DriveSchedule, t: float, p: SystemParams):
    """Instantaneous (g, f, delta1) of schedule ``d`` at time ``t``.

    Static values not programmed by the schedule are taken from ``p``.
    """
    if not math.isfinite(t):
        raise ValidationError("time must be finite")
    d.validate()
    if isinstance(d, Constant):
        return p.g, p.f, p.delta1
    if isinstance(d, AmplitudeModulated):
        return d.g0 + d.F * math.sin(d.omega * t), p.f, p.delta1
    if isinstance(d, EncirclementLoop):
        phase = d.sign * d.omega * t
        g = d.g0 + d.r * math.cos(phase)
        return g, g, d.r * math.sin(phase)
    raise ValidationError(f"unknown drive schedule {type(d).__name__}")


def coupled_rhs(p: SystemParams, s: FieldState, t: float = 0.0,
                d: DriveSchedule = Constant()) -> FieldState:
    """Right-hand side (da/dt, db/dt) of the coupled-mode equations.

    da/dt = -gamma1 a + i delta1 a + g a* - gs1 |a|^2 a + i kappa b
    db/dt = -gamma2 b + i delta2 b + f e^{i phi} b* - gs2 |b|^2 b + i kappa a
    """
    g, f, delta1 = eval_drive(d, t, p)
    a, b = complex(s.a), complex(s.b)
    da = ((-p.gamma1 + 1j * delta1) * a + g * a.conjugate()
          - p.gs1 * (a.real * a.real + a.imag * a.imag) * a + 1j * p.kappa * b)
    db = ((-p.gamma2 + 1j * p.delta2) * b + f * cmath.exp(1j * p.phi) * b.conjugate()
          - p.gs2 * (b.real * b.real + b.imag * b.imag) * b + 1j * p.kappa * a)
    return FieldState(a=da, b=db)


def _require_printed_form(p: SystemParams, who: str):
    if p.delta1 != 0.0 or p.delta2 != 0.0:
        raise ValidationError(
            f"{who} assumes zero detuning; use matrix_field_basis for delta != 0")
    if not p.symmetric:
        raise ValidationError(
            f"{who} assumes identical resonator losses; use matrix_field_basis")


def matrix_nondegenerate(p: SystemParams) -> np.ndarray:
    """Sideband eigenproblem matrix M acting on (A, B*, C, D*).

    Eigenvalues nu of M split as nu = lambda_R + i lambda_I: spectral
    splitting in the real part, growth/decay rate in the imaginary part.
    Requires delta1 = delta2 = 0 and gamma1 = gamma2.
    """
    _require_printed_form(p, "matrix_nondegenerate")
    gam, g, f, k = p.gamma1, p.g, p.f, p.kappa
    fe = f * np.exp(1j * p.phi)
    return np.array([
        [-1j * gam, 1j * g, -k, 0.0],
        [1j * g, -1j * gam, 0.0, k],
        [-k, 0.0, -1j * gam, 1j * fe],
        [0.0, k, 1j * fe.conjugate(), -1j * gam],
    ], dtype=complex)


def matrix_quadrature(p: SystemParams) -> np.ndarray:
    """Real generator Q of d/dt (X1, Y1, X2, Y2)^T in the degenerate picture.

    Requires delta1 = delta2 = 0 and gamma1 = gamma2.
    """
    _require_printed_form(p, "matrix_quadrature")
    gam, g, f, k = p.gamma1, p.g, p.f, p.kappa
    c, s = math.cos(p.phi), math.sin(p.phi)
    return np.array([
        [-gam + g, 0.0, 0.0, -k],
        [0.0, -gam - g, k, 0.0],
        [0.0, -k, -gam + f * c, f * s],
        [k, 0.0, f * s, -gam - f * c],
    ], dtype=float)


def matrix_field_basis(p: SystemParams) -> np.ndarray:
    """Linearization L of the coupled-mode equations in basis (a, a*, b, b*).

    Valid for arbitrary detunings and asymmetric losses. For
    delta1 = delta2 = 0 and equal losses, spectrum(L) = {-i nu} over the
    spectrum of ``matrix_nondegenerate``.
    """
    fe = p.f * np.exp(1j * p.phi)
    ik = 1j * p.kappa
    return np.array([
        [-p.gamma1 + 1j * p.delta1, p.g, ik, 0.0],
        [p.g, -p.gamma1 - 1j * p.delta1, 0.0, -ik],
        [ik, 0.0, -p.gamma2 + 1j * p.delta2, fe],
        [0.0, -ik, fe.conjugate(), -p.gamma2 - 1j * p.delta2],
    ], dtype=complex)
