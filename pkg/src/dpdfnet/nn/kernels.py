"""GRU sequence kernel with a compiled core and a NumPy fallback.

The recurrence h_t = f(x_t, h_{t-1}) cannot be vectorized over time, so the
step loop is the one genuinely hot piece of the engine.  A Cython kernel
(:mod:`dpdfnet.nn._gru_cy`, BLAS-backed) is used when the built extension
imports; otherwise a NumPy twin with identical semantics takes over.  Set
``DPDFNET_BACKEND=numpy`` (or ``compiled``) to force a choice at import, or
call :func:`use_backend` at runtime.
"""

from __future__ import annotations

import contextlib
import os

import numpy as np

try:  # built by setup.py; optional by design
    from . import _gru_cy
except ImportError:  # pragma: no cover - depends on build environment
    _gru_cy = None

_env = os.environ.get("DPDFNET_BACKEND", "auto")
_active = None  # resolved lazily so use_backend can override the env var


def _resolve(name: str) -> str:
    if name == "auto":
        return "compiled" if _gru_cy is not None else "numpy"
    if name == "compiled":
        if _gru_cy is None:
            raise RuntimeError("compiled kernel requested but the extension is not built")
        return "compiled"
    if name == "numpy":
        return "numpy"
    raise ValueError(f"unknown backend {name!r} (choose auto, compiled, or numpy)")


def active_backend() -> str:
    """Name of the kernel implementation currently in use."""
    global _active
    if _active is None:
        _active = _resolve(_env)
    return _active


@contextlib.contextmanager
def use_backend(name: str):
    """Temporarily select the kernel implementation within a ``with`` block.

    Accepts 'auto', 'compiled', or 'numpy'; the previous selection is
    restored on exit.
    """
    global _active
    previous = _active
    _active = _resolve(name)
    try:
        yield _active
    finally:
        _active = previous


def compiled_available() -> bool:
    return _gru_cy is not None


def _sigmoid(v):
    return 1.0 / (1.0 + np.exp(-v))


def gru_core_numpy(x_proj: np.ndarray, w_rec: np.ndarray, h0: np.ndarray):
    """Reference GRU step loop.

    x_proj: [S, B, 3H] input projections with bias already added, gate order
    (update z, reset r, candidate); w_rec: [H, 3H]; h0: [B, H].
    Returns ([S, B, H] hidden outputs, final [B, H] state).
    """
    steps, batch, h3 = x_proj.shape
    hidden = h3 // 3
    out = np.empty((steps, batch, hidden), dtype=np.float64)
    h = np.array(h0, dtype=np.float64, copy=True)
    for t in range(steps):
        g = x_proj[t]
        gh = h @ w_rec
        z = _sigmoid(g[:, :hidden] + gh[:, :hidden])
        r = _sigmoid(g[:, hidden : 2 * hidden] + gh[:, hidden : 2 * hidden])
        c = np.tanh(g[:, 2 * hidden :] + r * gh[:, 2 * hidden :])
        h = (1.0 - z) * c + z * h
        out[t] = h
    return out, h


def gru_core(x_proj: np.ndarray, w_rec: np.ndarray, h0: np.ndarray):
    """Run the GRU step loop on the active backend."""
    if active_backend() == "compiled":
        return _gru_cy.gru_core(
            np.ascontiguousarray(x_proj, dtype=np.float64),
            np.ascontiguousarray(w_rec, dtype=np.float64),
            np.ascontiguousarray(h0, dtype=np.float64),
        )
    return gru_core_numpy(x_proj, w_rec, h0)
