"""Monte Carlo universality experiments.

For each tuning value on a grid, fit the configured estimator on freshly
sampled block-dependent designs and on matched Gaussian controls across
replicates, then compare the mean estimation risks with each other (gap
z-score) and with the fixed-point prediction.

Randomness is addressed per cell: the design rows of replicate r at grid
index li draw from streams keyed (master_seed, li, r, tag, row), the noise
from (master_seed, li, r, tag).  The true signal and (for the functional
family) the scale diagonal are drawn once per experiment from the master
seed and held fixed across all cells, so summaries are reproducible under
any execution schedule.
"""
from __future__ import annotations

import hashlib
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.stats

from . import streams
from .asymptotics import predicted_risk, solve_fixed_point, spectrum_from_model
from .designs import (Dataset, DesignSpec, SignalSpec, block_uniform_lambda,
                      make_dataset, sample_design, simulate_responses)
from .errors import NumericError, SpecError
from .estimators import FitConfig, check_penalty, estimation_risk, fit
from .streams import (DEP_DESIGN_TAG, DEP_NOISE_TAG, GAUSS_DESIGN_TAG,
                      GAUSS_NOISE_TAG, stream)

LAMBDA_MODES = ("ones", "block-uniform")


def default_lambda_grid() -> np.ndarray:
    """Ten log-spaced tuning values on [0.05, 2]."""
    return np.geomspace(0.05, 2.0, 10)


@dataclass
class ExperimentConfig:
    """Everything needed to reproduce one universality experiment."""

    design: DesignSpec
    penalty: str
    n: int
    lambda_grid: np.ndarray
    replicates: int
    master_seed: int
    sigma: float
    signal: SignalSpec = field(default_factory=SignalSpec)
    paired_noise: bool = True
    lambda_mode: str = "ones"

    def __post_init__(self):
        check_penalty(self.penalty)
        self.lambda_grid = np.asarray(self.lambda_grid, dtype=float)
        if self.lambda_grid.size == 0:
            raise SpecError("lambda_grid must be nonempty")
        if np.any(self.lambda_grid <= 0) or np.any(np.diff(self.lambda_grid) <= 0):
            raise SpecError("lambda_grid must be ascending and positive")
        if self.replicates < 2:
            raise SpecError("need at least 2 replicates for standard errors")
        if self.n <= 0:
            raise SpecError("n must be positive")
        if self.sigma <= 0:
            raise SpecError("sigma must be positive")
        if self.master_seed < 0:
            raise SpecError("master_seed must be non-negative")
        if self.lambda_mode not in LAMBDA_MODES:
            raise SpecError(f"unknown lambda_mode {self.lambda_mode!r}")

    def lambda_index(self, lam: float) -> int:
        hits = np.flatnonzero(self.lambda_grid == lam)
        if hits.size != 1:
            raise SpecError(f"lambda {lam!r} is not a grid point")
        return int(hits[0])

    def signal_vector(self) -> np.ndarray:
        """The true coefficients; drawn once from the master seed."""
        return self.signal.draw(self.design.p, self.n, self.master_seed)

    def canonical_text(self) -> str:
        grid = ",".join(format(v, ".17g") for v in self.lambda_grid)
        lines = [
            f"family={self.design.family}",
            f"p0={self.design.p0}",
            f"d={self.design.d}",
            f"n={self.n}",
            f"penalty={self.penalty}",
            f"lambda_grid={grid}",
            f"replicates={self.replicates}",
            f"master_seed={self.master_seed}",
            f"sigma={format(self.sigma, '.17g')}",
            f"signal={self.signal.kind}",
            f"paired_noise={str(self.paired_noise).lower()}",
            f"lambda_mode={self.lambda_mode}",
        ]
        return "\n".join(lines) + "\n"

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()[:16]


def config_from_mapping(entries: dict) -> ExperimentConfig:
    """Build a config from flat key=value entries; unknown keys rejected."""
    known = {"family", "p0", "d", "n", "penalty", "lambda_grid", "replicates",
             "master_seed", "sigma", "signal", "paired_noise", "lambda_mode"}
    unknown = set(entries) - known
    if unknown:
        raise SpecError(f"unknown config keys: {sorted(unknown)}")
    missing = {"family", "p0", "d", "n", "penalty", "lambda_grid",
               "replicates", "master_seed"} - set(entries)
    if missing:
        raise SpecError(f"missing config keys: {sorted(missing)}")
    try:
        p0 = int(entries["p0"])
        d = int(entries["d"])
        n = int(entries["n"])
        replicates = int(entries["replicates"])
        master_seed = int(entries["master_seed"])
        sigma = float(entries.get("sigma", 1.0))
        grid = np.array([float(v) for v in entries["lambda_grid"].split(",")])
    except ValueError as exc:
        raise SpecError(f"malformed config value: {exc}") from exc
    paired_raw = str(entries.get("paired_noise", "true")).lower()
    if paired_raw not in ("true", "false"):
        raise SpecError(f"paired_noise must be true or false, got {paired_raw!r}")
    lambda_mode = entries.get("lambda_mode", "ones")
    if lambda_mode not in LAMBDA_MODES:
        raise SpecError(f"unknown lambda_mode {lambda_mode!r}")
    lambda_diag = None
    if lambda_mode == "block-uniform":
        lambda_diag = block_uniform_lambda(p0, d, master_seed)
    design = DesignSpec(entries["family"], p0, d, lambda_diag)
    signal = SignalSpec(kind=entries.get("signal", "bernoulli-scaled"))
    return ExperimentConfig(design=design, penalty=entries["penalty"], n=n,
                            lambda_grid=grid, replicates=replicates,
                            master_seed=master_seed, sigma=sigma, signal=signal,
                            paired_noise=paired_raw == "true",
                            lambda_mode=lambda_mode)


@dataclass
class SummaryRow:
    lam: float
    mean_risk_dependent: float
    se_dependent: float
    mean_risk_gaussian: float
    se_gaussian: float
    predicted_risk: float
    gap_zscore: float


@dataclass
class LambdaDiagnostics:
    """Worst-case fit diagnostics across the cells of one grid point."""

    lam: float
    max_kkt_dependent: float = 0.0
    max_kkt_gaussian: float = 0.0
    max_support_dependent: int = 0
    max_support_gaussian: int = 0
    max_linf_error: float = 0.0
    failures: int = 0


@dataclass
class ExperimentSummary:
    rows: list[SummaryRow]
    diagnostics: list[LambdaDiagnostics]
    config_hash: str
    wall_time: float
    failures: int
    cells: int


def run_replicate(config: ExperimentConfig, replicate_index: int, lam: float):
    """One (lambda, replicate) cell: fit on a dependent design and its
    Gaussian control, return both estimation risks and fit diagnostics.

    The signal is regenerated from the master seed (it is the same vector in
    every cell); designs and noise come from cell-keyed streams.  With paired
    noise the control reuses the dependent design's noise vector.
    """
    li = config.lambda_index(lam)
    beta0 = config.signal_vector()
    base = (config.master_seed, li, replicate_index)
    spec_dep = config.design
    spec_gauss = config.design.gaussian_control()

    dep = make_dataset(spec_dep, config.n, beta0, config.sigma,
                       design_key=(*base, DEP_DESIGN_TAG),
                       noise_rng=stream(*base, DEP_NOISE_TAG))
    x_g, structure_g = sample_design(spec_gauss, config.n, (*base, GAUSS_DESIGN_TAG))
    if config.paired_noise:
        xi_g = dep.xi.copy()
        y_g = x_g @ beta0 + xi_g
    else:
        y_g, xi_g = simulate_responses(x_g, beta0, config.sigma,
                                       stream(*base, GAUSS_NOISE_TAG))
    gauss = Dataset(x=x_g, y=y_g, beta0=beta0, xi=xi_g,
                    lambda_diag=spec_gauss.lambda_diag.copy(), structure=structure_g)

    fit_cfg = FitConfig(lam=float(lam))
    res_dep = fit(dep, config.penalty, fit_cfg)
    res_gauss = fit(gauss, config.penalty, fit_cfg)
    diagnostics = {
        "kkt_dependent": res_dep.kkt_residual,
        "kkt_gaussian": res_gauss.kkt_residual,
        "support_dependent": res_dep.support_size or 0,
        "support_gaussian": res_gauss.support_size or 0,
        "linf_error": float(np.max(np.abs(res_dep.beta_hat - beta0))),
    }
    return (estimation_risk(res_dep.beta_hat, beta0),
            estimation_risk(res_gauss.beta_hat, beta0),
            diagnostics)


def run_experiment(config: ExperimentConfig, threads: int = 1) -> ExperimentSummary:
    """Run all (lambda, replicate) cells and aggregate the summary.

    Cells are independent tasks; results are reduced in fixed (lambda,
    replicate) order, so the summary is identical under any thread count.
    Individual solver failures are tolerated up to 10% of cells, after which
    the whole experiment fails.
    """
    start = time.monotonic()
    n_lam = config.lambda_grid.size
    reps = config.replicates
    risk_dep = np.full((n_lam, reps), np.nan)
    risk_gauss = np.full((n_lam, reps), np.nan)
    cell_diags: dict[tuple[int, int], dict] = {}
    failures = 0

    def cell(args):
        li, rep = args
        try:
            rd, rg, diag = run_replicate(config, rep, float(config.lambda_grid[li]))
            return li, rep, rd, rg, diag, None
        except NumericError as exc:
            return li, rep, np.nan, np.nan, None, exc

    tasks = [(li, rep) for li in range(n_lam) for rep in range(reps)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(cell, tasks))
    else:
        outcomes = [cell(t) for t in tasks]

    errors = []
    for li, rep, rd, rg, diag, err in outcomes:
        if err is not None:
            failures += 1
            errors.append(f"lambda_index={li} replicate={rep}: {err}")
            continue
        risk_dep[li, rep] = rd
        risk_gauss[li, rep] = rg
        cell_diags[(li, rep)] = diag

    cells = len(tasks)
    if failures > 0.1 * cells:
        raise NumericError(
            f"{failures}/{cells} cells failed; first errors: {errors[:3]}")

    beta0 = config.signal_vector()
    spectrum = spectrum_from_model(beta0, config.design.lambda_diag, config.n,
                                   config.sigma)
    rows = []
    diags = []
    for li in range(n_lam):
        lam = float(config.lambda_grid[li])
        dep_vals = risk_dep[li][~np.isnan(risk_dep[li])]
        gauss_vals = risk_gauss[li][~np.isnan(risk_gauss[li])]
        mean_dep = float(np.mean(dep_vals))
        mean_gauss = float(np.mean(gauss_vals))
        se_dep = float(np.std(dep_vals, ddof=1) / np.sqrt(dep_vals.size))
        se_gauss = float(np.std(gauss_vals, ddof=1) / np.sqrt(gauss_vals.size))
        fp = solve_fixed_point(spectrum, lam, config.penalty)
        pred = predicted_risk(fp, spectrum, lam).value
        denom = np.hypot(se_dep, se_gauss)
        gap = abs(mean_dep - mean_gauss)
        zscore = 0.0 if gap == 0.0 else (np.inf if denom == 0.0 else gap / denom)
        rows.append(SummaryRow(lam=lam, mean_risk_dependent=mean_dep,
                               se_dependent=se_dep, mean_risk_gaussian=mean_gauss,
                               se_gaussian=se_gauss, predicted_risk=pred,
                               gap_zscore=float(zscore)))
        ld = LambdaDiagnostics(lam=lam)
        for rep in range(reps):
            diag = cell_diags.get((li, rep))
            if diag is None:
                ld.failures += 1
                continue
            ld.max_kkt_dependent = max(ld.max_kkt_dependent, diag["kkt_dependent"])
            ld.max_kkt_gaussian = max(ld.max_kkt_gaussian, diag["kkt_gaussian"])
            ld.max_support_dependent = max(ld.max_support_dependent,
                                           diag["support_dependent"])
            ld.max_support_gaussian = max(ld.max_support_gaussian,
                                          diag["support_gaussian"])
            ld.max_linf_error = max(ld.max_linf_error, diag["linf_error"])
        diags.append(ld)

    return ExperimentSummary(rows=rows, diagnostics=diags,
                             config_hash=config.config_hash(),
                             wall_time=time.monotonic() - start,
                             failures=failures, cells=cells)


SUMMARY_HEADER = ("lambda,mean_risk_dependent,se_dependent,mean_risk_gaussian,"
                  "se_gaussian,predicted_risk,gap_zscore")


def emit_summary(summary: ExperimentSummary, path) -> None:
    """Write the summary CSV; bit-stable for a fixed summary."""
    lines = [SUMMARY_HEADER]
    for row in summary.rows:
        values = (row.lam, row.mean_risk_dependent, row.se_dependent,
                  row.mean_risk_gaussian, row.se_gaussian, row.predicted_risk,
                  row.gap_zscore)
        lines.append(",".join(format(v, ".17g") for v in values))
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def normality_diagnostic(row_sampler, theta: np.ndarray, samples: int) -> float:
    """Kolmogorov-Smirnov distance of projected rows to the standard normal.

    Draws ``samples`` isotropic rows via ``row_sampler(i)``, projects them on
    theta / ||theta||, and returns the KS statistic against N(0,1).  Spiky
    directions (mass concentrated on one coordinate) make the projection
    visibly non-Gaussian for discrete families, which is exactly what this
    diagnostic is meant to surface.
    """
    theta = np.asarray(theta, dtype=float)
    norm = float(np.linalg.norm(theta))
    if norm == 0.0:
        raise SpecError("theta must be a nonzero vector")
    if samples <= 0:
        raise SpecError("samples must be positive")
    unit = theta / norm
    projections = np.array([row_sampler(i) @ unit for i in range(samples)])
    return float(scipy.stats.kstest(projections, "norm").statistic)
