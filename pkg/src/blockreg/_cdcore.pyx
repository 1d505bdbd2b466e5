# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled coordinate-descent kernel (hot loop of the Lasso solver)."""

from libc.math cimport fabs


def cd_sweeps(double[:, ::1] xt, double[::1] r, double[::1] beta,
              double[::1] col_norms2, double threshold, double tol,
              long max_sweeps):
    """Cyclic coordinate-descent sweeps, in place; see the Python fallback."""
    cdef Py_ssize_t p = xt.shape[0]
    cdef Py_ssize_t n = xt.shape[1]
    cdef Py_ssize_t i, j
    cdef long sweep
    cdef double cj, rho, bnew, diff, adiff, max_change

    max_change = tol + 1.0
    for sweep in range(max_sweeps):
        max_change = 0.0
        for j in range(p):
            cj = col_norms2[j]
            if cj <= 0.0:
                continue
            rho = cj * beta[j]
            for i in range(n):
                rho += xt[j, i] * r[i]
            if rho > threshold:
                bnew = (rho - threshold) / cj
            elif rho < -threshold:
                bnew = (rho + threshold) / cj
            else:
                bnew = 0.0
            diff = bnew - beta[j]
            if diff != 0.0:
                for i in range(n):
                    r[i] -= diff * xt[j, i]
                beta[j] = bnew
                adiff = fabs(diff)
                if adiff > max_change:
                    max_change = adiff
        if max_change <= tol:
            return sweep + 1, max_change
    return max_sweeps, max_change
