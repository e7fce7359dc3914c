"""Packing of drive schedules into the flat kernel encoding."""

from __future__ import annotations

from . import _kernels
from .errors import ValidationError
from .model import AmplitudeModulated, Constant, DriveSchedule, EncirclementLoop, SystemParams


def encode_drive(d: DriveSchedule, p: SystemParams, tie_f_to_g: bool = False):
    """Return (kind, coeffs[6]) consumed by the integration kernels."""
    d.validate()
    if isinstance(d, Constant):
        return _kernels.DRIVE_CONSTANT, (p.g, p.f, p.delta1, 0.0, 0.0, 0.0)
    if isinstance(d, AmplitudeModulated):
        return _kernels.DRIVE_AM, (d.g0, d.F, d.omega, p.f, p.delta1,
                                   1.0 if tie_f_to_g else 0.0)
    if isinstance(d, EncirclementLoop):
        return _kernels.DRIVE_LOOP, (d.g0, d.r, d.sign * d.omega, 0.0, 0.0, 0.0)
    raise ValidationError(f"unknown drive schedule {type(d).__name__}")
