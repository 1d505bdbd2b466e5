"""Proximal maps of the two penalties and their derivatives.

``soft_threshold`` is the proximal map of ``t*|x|`` and ``ridge_shrink`` the
proximal map of ``t*x^2/2``; both accept scalars or arrays.  The derivative of
the soft threshold at the kink is taken to be 0, which keeps solutions sparse
(the event has probability zero under any continuous input law).
"""
from __future__ import annotations

import numpy as np


def _check_threshold(t):
    if np.any(np.asarray(t) < 0):
        raise ValueError("threshold must be non-negative")


def soft_threshold(z, t):
    """sign(z) * max(|z| - t, 0)."""
    _check_threshold(t)
    z = np.asarray(z, dtype=float)
    out = np.sign(z) * np.maximum(np.abs(z) - t, 0.0)
    return float(out) if out.ndim == 0 else out


def soft_threshold_deriv(z, t):
    """Indicator of |z| > t (0 or 1)."""
    _check_threshold(t)
    z = np.asarray(z, dtype=float)
    out = (np.abs(z) > t).astype(float)
    return float(out) if out.ndim == 0 else out


def ridge_shrink(z, t):
    """z / (1 + t)."""
    _check_threshold(t)
    z = np.asarray(z, dtype=float)
    out = z / (1.0 + t)
    return float(out) if out.ndim == 0 else out


def ridge_shrink_deriv(z, t):
    """1 / (1 + t), independent of z."""
    _check_threshold(t)
    z = np.asarray(z, dtype=float)
    out = np.broadcast_arrays(z, 1.0 / (1.0 + np.asarray(t, dtype=float)))[1]
    return float(out) if out.ndim == 0 else out
