"""Block-dependent regression designs, penalized estimators, and their
fixed-point risk asymptotics, with a Monte Carlo universality harness."""

from .asymptotics import (FixedPoint, RiskPrediction, SignalSpectrum,
                          predicted_risk, solve_fixed_point,
                          spectrum_from_model, state_evolution_map)
from .designs import (BlockStructure, Dataset, DesignSpec, SignalSpec,
                      block_uniform_lambda, functional_block_row,
                      gwas_block_row, isotropic_row_sampler, make_dataset,
                      sample_design, simulate_responses, trig_row)
from .errors import (DataError, DivergenceError, NonConvergenceError,
                     NumericError, SpecError)
from .estimators import (FitConfig, FitResult, empirical_risk,
                         estimation_risk, fit, fit_lasso, fit_lasso_path,
                         fit_ridge)
from .experiments import (ExperimentConfig, ExperimentSummary,
                          config_from_mapping, default_lambda_grid,
                          emit_summary, normality_diagnostic, run_experiment,
                          run_replicate)
from .kernels import backend_name
from .moments import lasso_moments, lasso_moments_quadrature, ridge_moments
from .prox import (ridge_shrink, ridge_shrink_deriv, soft_threshold,
                   soft_threshold_deriv)

__version__ = "0.1.0"
