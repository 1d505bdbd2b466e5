"""Pure-Python coordinate-descent kernel; fallback for the compiled core.

Semantics match :mod:`blockreg._cdcore` exactly: cyclic sweeps over the
coordinates with closed-form soft-threshold updates and an in-place residual.
Results can differ from the compiled kernel only in the last floating-point
bits (BLAS dot products accumulate in a different order).
"""
from __future__ import annotations

import numpy as np


def cd_sweeps(xt: np.ndarray, r: np.ndarray, beta: np.ndarray,
              col_norms2: np.ndarray, threshold: float, tol: float,
              max_sweeps: int) -> tuple[int, float]:
    """Run cyclic coordinate-descent sweeps in place.

    Parameters
    ----------
    xt : (p, n) transposed design, row j is design column j
    r : (n,) residual y - x @ beta, updated in place
    beta : (p,) coefficients, updated in place
    col_norms2 : (p,) squared column norms
    threshold : soft-threshold level on the correlation scale
    tol : stop when the largest coordinate change in a sweep is <= tol
    max_sweeps : sweep cap

    Returns
    -------
    (sweeps_run, last_max_change)
    """
    p = xt.shape[0]
    max_change = np.inf
    for sweep in range(max_sweeps):
        max_change = 0.0
        for j in range(p):
            cj = col_norms2[j]
            if cj <= 0.0:
                continue
            xj = xt[j]
            rho = xj @ r + cj * beta[j]
            if rho > threshold:
                bnew = (rho - threshold) / cj
            elif rho < -threshold:
                bnew = (rho + threshold) / cj
            else:
                bnew = 0.0
            diff = bnew - beta[j]
            if diff != 0.0:
                r -= diff * xj
                beta[j] = bnew
                if abs(diff) > max_change:
                    max_change = abs(diff)
        if max_change <= tol:
            return sweep + 1, max_change
    return max_sweeps, max_change
