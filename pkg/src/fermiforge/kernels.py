"""Kernel implementation selection: compiled extension with NumPy fallback.

The compiled module is preferred when it imported cleanly; set the
environment variable ``FERMIFORGE_KERNELS=python`` (or ``compiled``) to
force a choice, or pass ``target="python"``/``"compiled"`` in a
BackendConfig for a per-call override.
"""

from __future__ import annotations

import os

from . import _kernels_py
from .errors import ValidationError

try:
    from . import _kernels as _compiled  # type: ignore[attr-defined]
except ImportError:  # extension not built; NumPy fallback only
    _compiled = None

HAVE_COMPILED = _compiled is not None

_ENV_CHOICE = os.environ.get("FERMIFORGE_KERNELS", "auto").lower()


def get_kernels(which: str = "auto"):
    """Return the kernel module for ``which`` in {"auto", "compiled", "python"}."""
    choice = (which or "auto").lower()
    if choice == "auto":
        choice = _ENV_CHOICE if _ENV_CHOICE in ("compiled", "python") else "auto"
    if choice == "auto":
        return _compiled if HAVE_COMPILED else _kernels_py
    if choice == "python":
        return _kernels_py
    if choice == "compiled":
        if not HAVE_COMPILED:
            raise ValidationError(
                "compiled kernels requested but the extension is not built; "
                "install with `pip install -e . --no-build-isolation`"
            )
        return _compiled
    raise ValidationError(f"unknown kernel target {which!r} (expected auto, compiled or python)")


def active_implementation(which: str = "auto") -> str:
    return get_kernels(which).IMPLEMENTATION
