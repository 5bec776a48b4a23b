"""Kernel selection: compiled extension when available, NumPy fallback otherwise.

Set AUCTIONSIM_PURE=1 to force the fallback (useful for benchmarking and
for debugging suspected extension issues).
"""

import os

from . import enum_py

_cy = None
if os.environ.get("AUCTIONSIM_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _enum_cy as _cy
    except ImportError:
        _cy = None

ACTIVE = "cython" if _cy is not None else "python"


def enumerate_best(*args, **kwargs):
    if _cy is not None:
        return _cy.enumerate_best(*args, **kwargs)
    return enum_py.enumerate_best(*args, **kwargs)


def get_kernel(name: str):
    """Fetch a specific kernel implementation by name ("python"/"cython")."""
    if name == "python":
        return enum_py.enumerate_best
    if name == "cython":
        if _cy is None:
            raise RuntimeError("compiled kernel not built (or AUCTIONSIM_PURE is set)")
        return _cy.enumerate_best
    raise ValueError(f"unknown kernel {name!r}")
