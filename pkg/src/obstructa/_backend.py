"""Kernel backend selection.

The F2 elimination kernels exist twice: a numba ``@njit`` loop version and a
vectorised pure-numpy version. ``OBSTRUCTA_BACKEND=numpy`` (or an
environment without numba) selects the latter.
"""

from __future__ import annotations

import os

try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a hard dependency
    _numba = None

HAVE_NUMBA = _numba is not None

_requested = os.environ.get("OBSTRUCTA_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise RuntimeError(f"OBSTRUCTA_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

_state = {"backend": "numba" if (_requested == "numba" and HAVE_NUMBA) else "numpy"}


def njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, identity decorator otherwise."""
    if HAVE_NUMBA:
        return _numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f


def get_backend() -> str:
    return _state["backend"]


def set_backend(name: str) -> str:
    """Switch backend at runtime; returns the previous one."""
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not importable")
    prev = _state["backend"]
    _state["backend"] = name
    return prev
