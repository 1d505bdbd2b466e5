"""Penalized least-squares estimators and their optimality diagnostics.

The objective is ``(1/2n) * sum((y - x beta)^2) + lam * f(beta)`` with
``f(beta) = ||beta||_1 / sqrt(n)`` for the Lasso and ``||beta||_2^2 / 2`` for
ridge.  Ridge is solved in closed form from its normal equations; the Lasso
by cyclic coordinate descent with exact soft-threshold updates (compiled
kernel when available, see :mod:`blockreg.kernels`).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .designs import Dataset
from .errors import DataError, NonConvergenceError, NumericError, SpecError
from .kernels import cd_sweeps

PENALTIES = ("lasso", "ridge")


def check_penalty(penalty: str) -> str:
    if penalty not in PENALTIES:
        raise SpecError(f"unknown penalty {penalty!r}; expected one of {PENALTIES}")
    return penalty


@dataclass
class FitConfig:
    """Solver settings: tuning parameter, tolerance, sweep cap, warm start."""

    lam: float
    tol: float = 1e-10
    max_sweeps: int = 100_000
    warm_start: np.ndarray | None = None

    def __post_init__(self):
        if self.lam <= 0:
            raise SpecError("lam must be positive")
        if self.tol <= 0:
            raise SpecError("tol must be positive")
        if self.max_sweeps <= 0:
            raise SpecError("max_sweeps must be positive")


@dataclass
class FitResult:
    """An estimator output.

    ``optimum`` is the objective at ``beta_hat``; ``kkt_residual`` the largest
    violation of the stationarity conditions; ``support_size`` the number of
    nonzero coefficients (None for ridge, whose solution is dense).
    """

    beta_hat: np.ndarray
    optimum: float
    iterations: int
    kkt_residual: float
    support_size: int | None = None


def penalty_value(beta: np.ndarray, n: int, penalty: str) -> float:
    """f(beta): the penalty without its tuning parameter."""
    check_penalty(penalty)
    beta = np.asarray(beta, dtype=float)
    if penalty == "lasso":
        return float(np.sum(np.abs(beta)) / np.sqrt(n))
    return float(0.5 * np.sum(beta * beta))


def empirical_risk(beta: np.ndarray, dataset: Dataset, lam: float, penalty: str) -> float:
    """(1/2n) ||y - x beta||^2 + lam * f(beta)."""
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (dataset.p,):
        raise DataError(f"beta has shape {beta.shape}, expected ({dataset.p},)")
    resid = dataset.y - dataset.x @ beta
    return float(resid @ resid / (2 * dataset.n) + lam * penalty_value(beta, dataset.n, penalty))


def estimation_risk(beta_hat: np.ndarray, beta0: np.ndarray) -> float:
    """Squared Euclidean distance ||beta_hat - beta0||^2."""
    beta_hat = np.asarray(beta_hat, dtype=float)
    beta0 = np.asarray(beta0, dtype=float)
    if beta_hat.shape != beta0.shape:
        raise DataError("beta_hat and beta0 have different lengths")
    diff = beta_hat - beta0
    return float(diff @ diff)


def fit_ridge(dataset: Dataset, config: FitConfig) -> FitResult:
    """Solve the ridge normal equations (x'x + n lam I) beta = x'y directly."""
    n = dataset.n
    gram = dataset.x.T @ dataset.x
    gram[np.diag_indices_from(gram)] += n * config.lam
    xty = dataset.x.T @ dataset.y
    try:
        beta = scipy.linalg.solve(gram, xty, assume_a="pos")
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - lam > 0 keeps it PD
        raise NumericError(f"ridge normal equations failed to factorize: {exc}") from exc
    kkt = float(np.max(np.abs(gram @ beta - xty))) if beta.size else 0.0
    optimum = empirical_risk(beta, dataset, config.lam, "ridge")
    return FitResult(beta_hat=beta, optimum=optimum, iterations=1, kkt_residual=kkt)


def _lasso_kkt_residual(xt, r, beta, n, lam):
    """Largest violation of the Lasso stationarity conditions.

    With g = x'(y - x beta)/n and thr = lam/sqrt(n): inactive coordinates need
    |g_j| <= thr, active ones g_j = sign(beta_j) * thr.
    """
    g = xt @ r / n
    thr = lam / np.sqrt(n)
    active = beta != 0.0
    viol = np.maximum(np.abs(g) - thr, 0.0)
    viol[active] = np.abs(g[active] - np.sign(beta[active]) * thr)
    return float(np.max(viol)) if viol.size else 0.0


def fit_lasso(dataset: Dataset, config: FitConfig) -> FitResult:
    """Cyclic coordinate descent on the Lasso objective.

    Converges when the largest coordinate change in a sweep is <= tol;
    raises :class:`NonConvergenceError` (carrying the last iterate) when the
    sweep cap is hit first.
    """
    n, p = dataset.n, dataset.p
    xt = np.ascontiguousarray(dataset.x.T)
    col_norms2 = np.einsum("ij,ij->i", xt, xt)
    if config.warm_start is not None:
        beta = np.array(config.warm_start, dtype=float, copy=True)
        if beta.shape != (p,):
            raise DataError("warm_start has wrong length")
        beta[col_norms2 <= 0.0] = 0.0
        r = dataset.y - dataset.x @ beta
    else:
        beta = np.zeros(p)
        r = dataset.y.astype(float, copy=True)
    threshold = config.lam * np.sqrt(n)
    sweeps, max_change = cd_sweeps(xt, r, beta, col_norms2, threshold,
                                   config.tol, config.max_sweeps)
    kkt = _lasso_kkt_residual(xt, r, beta, n, config.lam)
    optimum = empirical_risk(beta, dataset, config.lam, "lasso")
    result = FitResult(beta_hat=beta, optimum=optimum, iterations=sweeps,
                       kkt_residual=kkt, support_size=int(np.count_nonzero(beta)))
    if max_change > config.tol:
        raise NonConvergenceError(
            f"coordinate descent did not reach tol={config.tol} in "
            f"{config.max_sweeps} sweeps (last change {max_change:.3e})",
            last_iterate=result,
            diagnostics={"max_change": max_change, "kkt_residual": kkt},
        )
    return result


def fit(dataset: Dataset, penalty: str, config: FitConfig) -> FitResult:
    """Dispatch to the configured estimator."""
    check_penalty(penalty)
    return fit_lasso(dataset, config) if penalty == "lasso" else fit_ridge(dataset, config)


def fit_lasso_path(dataset: Dataset, lams, tol: float = 1e-10,
                   max_sweeps: int = 100_000) -> list[FitResult]:
    """Fit a whole lambda grid, warm-starting down the path.

    Solves from the largest lambda to the smallest, reusing each solution as
    the next start, and returns results in the order the grid was given.
    """
    lams = np.asarray(lams, dtype=float)
    order = np.argsort(lams)[::-1]
    results: dict[int, FitResult] = {}
    warm = None
    for idx in order:
        res = fit_lasso(dataset, FitConfig(lam=float(lams[idx]), tol=tol,
                                           max_sweeps=max_sweeps, warm_start=warm))
        warm = res.beta_hat
        results[int(idx)] = res
    return [results[i] for i in range(len(lams))]
