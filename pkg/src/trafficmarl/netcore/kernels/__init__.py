"""Kernel backend selection.

The hot numeric kernels exist twice: a numba @njit build and a pure-numpy
fallback. The active backend is chosen at import time from the
``TRAFFICMARL_BACKEND`` environment variable (``numba`` or ``numpy``);
default is numba when importable, numpy otherwise. ``set_backend`` swaps
the backend in-process (used by the benchmark and by tests); do not swap
mid-run if you care about bit-level reproducibility.
"""

import os

from . import numpy_backend

_BACKENDS = {"numpy": numpy_backend}

try:
    from . import numba_backend
    _BACKENDS["numba"] = numba_backend
except ImportError:  # pragma: no cover - numba is a hard dep, but stay usable
    numba_backend = None

_active = None


def available_backends():
    return sorted(_BACKENDS)


def set_backend(name):
    """Select the kernel backend by name. Returns the backend module."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(
            f"unknown kernel backend {name!r}; available: {available_backends()}")
    _active = _BACKENDS[name]
    return _active


def get_backend(name):
    if name not in _BACKENDS:
        raise ValueError(
            f"unknown kernel backend {name!r}; available: {available_backends()}")
    return _BACKENDS[name]


def active():
    return _active


def backend_name():
    return _active.NAME


_requested = os.environ.get("TRAFFICMARL_BACKEND")
if _requested:
    set_backend(_requested)
else:
    set_backend("numba" if "numba" in _BACKENDS else "numpy")
