"""Shape-operator kernels with a switchable backend.

``UMBILIC_BACKEND=numpy`` forces the vectorized numpy path; ``numba`` (the
default when numba imports) uses compiled per-sample loops.
``UMBILIC_THREADS`` caps the numba thread pool.
"""
from __future__ import annotations

import os

import numpy as np

from . import _numpy

try:
    from . import _numba
except ImportError:  # pragma: no cover - numba is an optional accelerator
    _numba = None

_BACKENDS = ("numpy", "numba")


def available_backends() -> tuple[str, ...]:
    return _BACKENDS if _numba is not None else ("numpy",)


def active_backend() -> str:
    name = os.environ.get("UMBILIC_BACKEND", "").strip().lower()
    if not name:
        return "numba" if _numba is not None else "numpy"
    if name not in _BACKENDS:
        raise ValueError(f"UMBILIC_BACKEND must be one of {_BACKENDS}, got {name!r}")
    if name == "numba" and _numba is None:
        raise ValueError("UMBILIC_BACKEND=numba but numba is not installed")
    return name


def _apply_threads():
    raw = os.environ.get("UMBILIC_THREADS")
    if raw and _numba is not None:
        import numba

        numba.set_num_threads(max(1, min(int(raw), numba.config.NUMBA_NUM_THREADS)))


def _module(backend: str | None):
    name = backend or active_backend()
    if name == "numba":
        if _numba is None:
            raise ValueError("numba backend requested but numba is not installed")
        _apply_threads()
        return _numba
    return _numpy


def flat_shape_operator(P, sig, mask, ref, h, backend: str | None = None):
    mod = _module(backend)
    P = np.ascontiguousarray(P, dtype=float)
    ref = np.ascontiguousarray(np.broadcast_to(ref, (P.shape[0], P.shape[-1])), dtype=float)
    return mod.flat_shape_operator(P, np.asarray(sig, dtype=float),
                                   np.asarray(mask, dtype=float), ref, float(h))


def chart_shape_operator(P, G, dG, ref, h, backend: str | None = None):
    mod = _module(backend)
    P = np.ascontiguousarray(P, dtype=float)
    ref = np.ascontiguousarray(np.broadcast_to(ref, (P.shape[0], P.shape[-1])), dtype=float)
    return mod.chart_shape_operator(P, np.ascontiguousarray(G, dtype=float),
                                    np.ascontiguousarray(dG, dtype=float), ref, float(h))
