"""Fixed-point risk asymptotics for the penalized estimators.

In the proportional regime the estimation risk concentrates around a value
determined by a pair of scalars (beta_star, gamma_star) solving a two-equation
fixed-point system driven by the empirical signal/scale measure.  Working on
the rescaled ("w") coordinates, with per-coordinate signal mu0_i and scale
omega_i, aspect ratio kappa = p/n, noise level sigma, and per-coordinate
thresholds

    t_i = gamma * lam * omega_i^2 / beta   (ridge)
    t_i = gamma * lam * omega_i   / beta   (lasso)

the system reads

    gamma^2 = sigma^2 + kappa * mean_i E[(prox(mu0_i + gamma Z, t_i) - mu0_i)^2]
    beta    = gamma * (1 - kappa * mean_i E[prox'(mu0_i + gamma Z, t_i)])

(the noise variance enters explicitly; with sigma = 1 this is the normalized
form).  The predicted estimation risk is the per-coordinate sum
sum_i (omega_i^2 / n) * E[(prox(mu0_i + gamma* Z, t_i*) - mu0_i)^2], which by
the scale identities of the proximal maps equals the original-coordinate
("beta-scale") expectation.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DivergenceError, NonConvergenceError, SpecError
from .moments import lasso_moments, ridge_moments
from .estimators import check_penalty

# adaptive damping limits for the Picard solver
_DAMPING_INIT = 0.5
_DAMPING_MIN = 1e-3
_DAMPING_GROW = 1.2
_BETA_FLOOR = 1e-13


@dataclass
class SignalSpectrum:
    """Per-coordinate signal/scale pairs plus the problem aspect and noise.

    mu0_i = sqrt(n * lambda_i) * beta0_i and omega_i = lambda_i^{-1/2}; the
    fixed-point expectations are exact averages over the p observed pairs.
    """

    mu0: np.ndarray
    omega: np.ndarray
    ratio: float
    sigma: float

    def __post_init__(self):
        self.mu0 = np.asarray(self.mu0, dtype=float)
        self.omega = np.asarray(self.omega, dtype=float)
        if self.mu0.shape != self.omega.shape or self.mu0.ndim != 1:
            raise SpecError("mu0 and omega must be 1-D of equal length")
        if not np.all(np.isfinite(self.mu0)):
            raise SpecError("mu0 entries must be finite")
        if not np.all(np.isfinite(self.omega)) or np.any(self.omega <= 0):
            raise SpecError("omega entries must be positive and finite")
        if self.ratio < 0:
            raise SpecError("ratio must be non-negative")
        if self.sigma <= 0:
            raise SpecError("sigma must be positive")

    @property
    def p(self) -> int:
        return self.mu0.size


def spectrum_from_model(beta0, lambda_diag, n: int, sigma: float) -> SignalSpectrum:
    """Build the spectrum for a concrete model instance."""
    beta0 = np.asarray(beta0, dtype=float)
    lambda_diag = np.asarray(lambda_diag, dtype=float)
    if np.any(lambda_diag <= 0):
        raise SpecError("lambda_diag entries must be positive")
    if beta0.shape != lambda_diag.shape:
        raise SpecError("beta0 and lambda_diag must have equal length")
    if n <= 0:
        raise SpecError("n must be positive")
    mu0 = np.sqrt(n * lambda_diag) * beta0
    omega = lambda_diag**-0.5
    return SignalSpectrum(mu0=mu0, omega=omega, ratio=beta0.size / n, sigma=sigma)


@dataclass
class FixedPoint:
    """A solved (beta_star, gamma_star) pair with its recomputed residual."""

    beta_star: float
    gamma_star: float
    residual: float
    iterations: int
    penalty: str
    tol: float = 1e-10


@dataclass
class RiskPrediction:
    """Predicted squared-error risk and its per-coordinate contributions."""

    value: float
    per_coordinate: np.ndarray | None = None


def _moments(penalty, mu0, gamma, t, check=False):
    if penalty == "ridge":
        return ridge_moments(mu0, gamma, t)
    return lasso_moments(mu0, gamma, t, check=check)


def thresholds(spectrum: SignalSpectrum, penalty: str, lam: float,
               beta: float, gamma: float) -> np.ndarray:
    """Per-coordinate proximal thresholds t_i at the current (beta, gamma)."""
    check_penalty(penalty)
    power = 2 if penalty == "ridge" else 1
    return gamma * lam * spectrum.omega**power / beta


def _raw_map(current, spectrum, lam, penalty):
    """One un-damped update; may return a non-positive beta_next."""
    beta, gamma = current
    t = thresholds(spectrum, penalty, lam, beta, gamma)
    if spectrum.p == 0 or spectrum.ratio == 0.0:
        return spectrum.sigma, spectrum.sigma
    second, _ = _moments(penalty, spectrum.mu0, gamma, t)
    gamma_next = float(np.sqrt(spectrum.sigma**2 + spectrum.ratio * np.mean(second)))
    _, deriv = _moments(penalty, spectrum.mu0, gamma_next, t)
    beta_next = gamma_next * (1.0 - spectrum.ratio * float(np.mean(deriv)))
    return beta_next, gamma_next


def state_evolution_map(current, spectrum: SignalSpectrum, lam: float,
                        penalty: str) -> tuple[float, float]:
    """One update of the fixed-point system.

    Raises :class:`DivergenceError` when the update leaves the valid region
    (beta_next <= 0), which happens outside the basin of the fixed point.
    """
    check_penalty(penalty)
    beta, gamma = current
    if beta <= 0 or gamma <= 0:
        raise SpecError("beta and gamma must be positive")
    if lam <= 0:
        raise SpecError("lam must be positive")
    beta_next, gamma_next = _raw_map(current, spectrum, lam, penalty)
    if beta_next <= 0:
        raise DivergenceError(
            f"update left the valid region: beta_next={beta_next:.3e} at "
            f"(beta={beta:.3e}, gamma={gamma:.3e})",
            trajectory=[(beta, gamma)])
    return beta_next, gamma_next


def _equation_defects(beta, gamma, spectrum, lam, penalty, check=False):
    """Absolute defects of the two fixed-point equations at (beta, gamma)."""
    if spectrum.p == 0 or spectrum.ratio == 0.0:
        return abs(gamma**2 - spectrum.sigma**2), abs(beta - gamma)
    t = thresholds(spectrum, penalty, lam, beta, gamma)
    second, deriv = _moments(penalty, spectrum.mu0, gamma, t, check=check)
    d1 = abs(gamma**2 - spectrum.sigma**2 - spectrum.ratio * float(np.mean(second)))
    d2 = abs(beta - gamma * (1.0 - spectrum.ratio * float(np.mean(deriv))))
    return d1, d2


def default_initialization(spectrum: SignalSpectrum) -> tuple[float, float]:
    """Starting point: gamma from the no-shrinkage second moment, beta = gamma/2."""
    if spectrum.p == 0:
        gamma0 = spectrum.sigma
    else:
        gamma0 = float(np.sqrt(spectrum.sigma**2
                               + spectrum.ratio * np.mean(spectrum.mu0**2 + 1.0)))
    return gamma0 / 2.0, gamma0


def solve_fixed_point(spectrum: SignalSpectrum, lam: float, penalty: str,
                      tol: float = 1e-10, max_iter: int = 50_000,
                      init: tuple[float, float] | None = None) -> FixedPoint:
    """Damped Picard iteration of the fixed-point system.

    Damping starts at 0.5 and adapts: it halves when consecutive beta-updates
    oscillate without shrinking or when the raw map leaves the valid region
    (beta is then halved outright to re-enter it), and recovers geometrically
    while the iteration contracts.  Ill-conditioned corners (small lam at
    aspect ratio > 1) make the raw map locally expansive, so a fixed damping
    cannot converge there.  Iteration stops when both raw-map defects are
    <= tol; the reported residual re-evaluates the equations from scratch with
    the cross-checked moment routes.

    Raises :class:`DivergenceError` if beta collapses to the floor and
    :class:`NonConvergenceError` at the iteration cap; both carry trajectory
    diagnostics.
    """
    check_penalty(penalty)
    if lam <= 0:
        raise SpecError("lam must be positive")
    if tol <= 0:
        raise SpecError("tol must be positive")
    beta, gamma = init if init is not None else default_initialization(spectrum)
    if beta <= 0 or gamma <= 0:
        raise SpecError("initialization must be positive")
    if spectrum.p == 0 or spectrum.ratio == 0.0:
        # the system degenerates to beta = gamma = sigma
        return FixedPoint(beta_star=spectrum.sigma, gamma_star=spectrum.sigma,
                          residual=0.0, iterations=1, penalty=penalty, tol=tol)

    damping = _DAMPING_INIT
    prev_step = None
    trajectory = [(beta, gamma)]
    for iteration in range(1, max_iter + 1):
        beta_next, gamma_next = _raw_map((beta, gamma), spectrum, lam, penalty)
        if beta_next <= 0.0:
            if beta < _BETA_FLOOR:
                raise DivergenceError(
                    f"beta collapsed below {_BETA_FLOOR} at iteration {iteration}",
                    trajectory=trajectory[-50:])
            damping = max(damping / 2.0, _DAMPING_MIN)
            beta = beta / 2.0
            gamma = (1.0 - damping) * gamma + damping * gamma_next
            prev_step = None
            trajectory.append((beta, gamma))
            continue
        step_beta = beta_next - beta
        step_gamma = gamma_next - gamma
        if max(abs(step_beta), abs(step_gamma)) <= tol:
            d1, d2 = _equation_defects(beta, gamma, spectrum, lam, penalty, check=True)
            return FixedPoint(beta_star=beta, gamma_star=gamma,
                              residual=max(d1, d2), iterations=iteration,
                              penalty=penalty, tol=tol)
        if prev_step is not None:
            if step_beta * prev_step < 0 and abs(step_beta) >= 0.9 * abs(prev_step):
                damping = max(damping / 2.0, _DAMPING_MIN)
            elif abs(step_beta) <= 0.7 * abs(prev_step):
                damping = min(_DAMPING_INIT, damping * _DAMPING_GROW)
        beta += damping * step_beta
        gamma += damping * step_gamma
        prev_step = step_beta
        trajectory.append((beta, gamma))
    raise NonConvergenceError(
        f"fixed-point iteration did not reach tol={tol} in {max_iter} steps",
        last_iterate=(beta, gamma),
        diagnostics={"trajectory_tail": trajectory[-50:]})


def predicted_risk(fp: FixedPoint, spectrum: SignalSpectrum, lam: float) -> RiskPrediction:
    """Predicted ||beta_hat - beta0||^2 limit implied by a solved fixed point.

    Coordinate i contributes (omega_i^2 / n) * second_moment(mu0_i, gamma*,
    t_i*), the rescaled-coordinate form of the limiting risk expectation.
    """
    if fp.residual > 10 * fp.tol:
        raise SpecError(
            f"fixed point not converged: residual {fp.residual:.3e} > 10*tol")
    if spectrum.p == 0 or spectrum.ratio == 0.0:
        return RiskPrediction(value=0.0, per_coordinate=np.zeros(spectrum.p))
    n = spectrum.p / spectrum.ratio
    t = thresholds(spectrum, fp.penalty, lam, fp.beta_star, fp.gamma_star)
    second, _ = _moments(fp.penalty, spectrum.mu0, fp.gamma_star, t)
    per_coordinate = spectrum.omega**2 / n * second
    return RiskPrediction(value=float(np.sum(per_coordinate)),
                          per_coordinate=per_coordinate)
