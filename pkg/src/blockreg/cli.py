"""Command-line interface.

Subcommands: sample, fit, state-evolution, experiment, diagnose.  Every
subcommand accepts --seed and is deterministic given its flags.  Exit codes:
0 success, 2 usage or parse failure, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import fileio
from .asymptotics import predicted_risk, solve_fixed_point
from .designs import (FAMILIES, Dataset, DesignSpec, block_uniform_lambda,
                      isotropic_row_sampler, sample_design)
from .errors import DataError, NumericError, SpecError
from .estimators import FitConfig, estimation_risk, fit
from .experiments import (config_from_mapping, emit_summary, normality_diagnostic,
                          run_experiment)

USAGE_EXIT = 2
NUMERIC_EXIT = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blockreg",
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_sample = sub.add_parser("sample", help="sample a design matrix")
    p_sample.add_argument("--family", required=True, choices=FAMILIES)
    p_sample.add_argument("--p0", type=int, required=True)
    p_sample.add_argument("--d", type=int, required=True)
    p_sample.add_argument("--n", type=int, required=True)
    p_sample.add_argument("--seed", type=int, default=0)
    p_sample.add_argument("--lambda-mode", choices=("ones", "block-uniform"),
                          default="ones")
    p_sample.add_argument("--sigma", type=float, default=1.0,
                          help="noise level recorded in the sidecar spec")
    p_sample.add_argument("--out", required=True)

    p_fit = sub.add_parser("fit", help="fit an estimator on files")
    p_fit.add_argument("--penalty", required=True, choices=("lasso", "ridge"))
    p_fit.add_argument("--lambda", dest="lam", type=float, required=True)
    p_fit.add_argument("--design", required=True)
    p_fit.add_argument("--y", required=True)
    p_fit.add_argument("--beta0", default=None,
                       help="true coefficients; enables the risk metric")
    p_fit.add_argument("--tol", type=float, default=1e-10)
    p_fit.add_argument("--max-sweeps", type=int, default=100_000)
    p_fit.add_argument("--seed", type=int, default=0)
    p_fit.add_argument("--out", required=True,
                       help="coefficient vector file; metrics go to stdout")

    p_se = sub.add_parser("state-evolution", help="solve the fixed-point system")
    p_se.add_argument("--penalty", required=True, choices=("lasso", "ridge"))
    p_se.add_argument("--lambda", dest="lam", type=float, required=True)
    p_se.add_argument("--spectrum", required=True)
    p_se.add_argument("--tol", type=float, default=1e-10)
    p_se.add_argument("--seed", type=int, default=0)
    p_se.add_argument("--out", default=None)

    p_exp = sub.add_parser("experiment", help="run a Monte Carlo experiment")
    p_exp.add_argument("--config", required=True)
    p_exp.add_argument("--out", required=True)
    p_exp.add_argument("--threads", type=int, default=1)
    p_exp.add_argument("--seed", type=int, default=None,
                       help="override master_seed from the config")

    p_diag = sub.add_parser("diagnose", help="KS normality diagnostic")
    p_diag.add_argument("--design-spec", required=True)
    p_diag.add_argument("--theta", required=True)
    p_diag.add_argument("--samples", type=int, default=2000)
    p_diag.add_argument("--seed", type=int, default=0)

    return parser


def _cmd_sample(args) -> int:
    lambda_diag = None
    if args.lambda_mode == "block-uniform":
        lambda_diag = block_uniform_lambda(args.p0, args.d, args.seed)
    spec = DesignSpec(args.family, args.p0, args.d, lambda_diag)
    x, _ = sample_design(spec, args.n, (args.seed, 0))
    fileio.write_matrix(args.out, x)
    fileio.write_design_spec(str(args.out) + ".spec", spec, args.seed,
                             args.lambda_mode, args.sigma)
    return 0


def _cmd_fit(args) -> int:
    x = fileio.read_matrix(args.design)
    y = fileio.read_vector(args.y)
    if y.size != x.shape[0]:
        raise DataError(f"y has {y.size} entries for {x.shape[0]} design rows")
    beta0 = np.zeros(x.shape[1])
    if args.beta0 is not None:
        beta0 = fileio.read_vector(args.beta0)
        if beta0.size != x.shape[1]:
            raise DataError("beta0 length does not match the design")
    from .designs import BlockStructure

    dataset = Dataset(x=x, y=y, beta0=beta0, xi=y - x @ beta0,
                      lambda_diag=np.ones(x.shape[1]),
                      structure=BlockStructure.contiguous(x.shape[1], 1))
    config = FitConfig(lam=args.lam, tol=args.tol, max_sweeps=args.max_sweeps)
    result = fit(dataset, args.penalty, config)
    fileio.write_vector(args.out, result.beta_hat)
    metrics = [f"optimum={format(result.optimum, '.17g')}",
               f"kkt_residual={format(result.kkt_residual, '.17g')}",
               f"iterations={result.iterations}",
               f"support_size={result.support_size if result.support_size is not None else ''}"]
    if args.beta0 is not None:
        metrics.append(
            f"estimation_risk={format(estimation_risk(result.beta_hat, beta0), '.17g')}")
    print(" ".join(metrics))
    return 0


def _cmd_state_evolution(args) -> int:
    spectrum = fileio.read_spectrum(args.spectrum)
    fp = solve_fixed_point(spectrum, args.lam, args.penalty, tol=args.tol)
    risk = predicted_risk(fp, spectrum, args.lam)
    lines = [f"beta_star={format(fp.beta_star, '.17g')}",
             f"gamma_star={format(fp.gamma_star, '.17g')}",
             f"residual={format(fp.residual, '.17g')}",
             f"predicted_risk={format(risk.value, '.17g')}"]
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    return 0


def _cmd_experiment(args) -> int:
    entries = fileio.read_config(args.config)
    if args.seed is not None:
        entries["master_seed"] = str(args.seed)
    config = config_from_mapping(entries)
    if args.threads < 1:
        raise SpecError("--threads must be >= 1")
    summary = run_experiment(config, threads=args.threads)
    emit_summary(summary, args.out)
    print(f"wrote {args.out} ({len(summary.rows)} rows, "
          f"{summary.failures}/{summary.cells} failed cells, "
          f"{summary.wall_time:.1f}s)")
    return 0


def _cmd_diagnose(args) -> int:
    spec, seed, _, _ = fileio.read_design_spec(args.design_spec)
    theta = fileio.read_vector(args.theta)
    if theta.size != spec.p:
        raise DataError("theta length does not match the design spec")
    sampler = isotropic_row_sampler(spec, (args.seed if args.seed else seed, 1))
    ks = normality_diagnostic(sampler, theta, args.samples)
    print(format(ks, ".17g"))
    return 0


_COMMANDS = {
    "sample": _cmd_sample,
    "fit": _cmd_fit,
    "state-evolution": _cmd_state_evolution,
    "experiment": _cmd_experiment,
    "diagnose": _cmd_diagnose,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (SpecError, DataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except NumericError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return NUMERIC_EXIT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT


if __name__ == "__main__":           # pragma: no cover
    sys.exit(main())
