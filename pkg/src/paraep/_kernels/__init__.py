"""Hot-kernel backend selection.

The compiled Cython extension is used when importable; otherwise the pure
Python reference takes over.  ``PARA_EP_BACKEND`` forces the choice:
``compiled``, ``python`` or ``auto`` (default).
"""

from __future__ import annotations

import os

from . import _ref

__all__ = [
    "backend",
    "backend_name",
    "available_backends",
    "get_backend",
    "DRIVE_CONSTANT",
    "DRIVE_AM",
    "DRIVE_LOOP",
    "STATUS_OK",
    "STATUS_STEP_UNDERFLOW",
    "STATUS_MAX_STEPS",
]

DRIVE_CONSTANT = _ref.DRIVE_CONSTANT
DRIVE_AM = _ref.DRIVE_AM
DRIVE_LOOP = _ref.DRIVE_LOOP
STATUS_OK = _ref.STATUS_OK
STATUS_STEP_UNDERFLOW = _ref.STATUS_STEP_UNDERFLOW
STATUS_MAX_STEPS = _ref.STATUS_MAX_STEPS

try:
    from . import _core
except ImportError:  # pragma: no cover - depends on the build environment
    _core = None


def available_backends():
    names = ["python"]
    if _core is not None:
        names.insert(0, "compiled")
    return names


def get_backend(name: str):
    if name == "python":
        return _ref
    if name == "compiled":
        if _core is None:
            raise RuntimeError("compiled kernel extension is not available")
        return _core
    raise ValueError(f"unknown backend {name!r}")


def _select():
    choice = os.environ.get("PARA_EP_BACKEND", "auto").lower()
    if choice == "auto":
        return _core if _core is not None else _ref
    return get_backend(choice)


backend = _select()
backend_name = backend.BACKEND_NAME
