import numpy as np
import pytest

import blockreg.experiments as experiments_mod
from blockreg import (DesignSpec, ExperimentConfig, NonConvergenceError,
                      NumericError, SignalSpec, SpecError,
                      config_from_mapping, default_lambda_grid, emit_summary,
                      isotropic_row_sampler, normality_diagnostic,
                      run_experiment, run_replicate)
from blockreg.experiments import SUMMARY_HEADER, ExperimentSummary
from blockreg.streams import stream


def small_config(**overrides):
    entries = {
        "family": "additive-trig", "p0": 5, "d": 4, "n": 30,
        "penalty": "lasso", "lambda_grid": "0.3,1.0", "replicates": 4,
        "master_seed": 21, "sigma": "1.0", "paired_noise": "false",
    }
    entries.update(overrides)
    return config_from_mapping(entries)


class TestConfig:
    def test_unknown_keys_rejected(self):
        with pytest.raises(SpecError, match="unknown config keys"):
            small_config(flavour="spicy")

    def test_missing_keys_rejected(self):
        entries = {"family": "gaussian", "p0": 2}
        with pytest.raises(SpecError, match="missing config keys"):
            config_from_mapping(entries)

    def test_grid_must_ascend(self):
        with pytest.raises(SpecError):
            small_config(lambda_grid="1.0,0.3")

    def test_needs_two_replicates(self):
        with pytest.raises(SpecError):
            small_config(replicates=1)

    def test_block_uniform_lambda_fixed_by_seed(self):
        c1 = small_config(family="functional-block", lambda_mode="block-uniform")
        c2 = small_config(family="functional-block", lambda_mode="block-uniform")
        np.testing.assert_array_equal(c1.design.lambda_diag, c2.design.lambda_diag)
        block = c1.design.lambda_diag[:4]
        for j in range(1, 5):
            np.testing.assert_array_equal(c1.design.lambda_diag[j*4:(j+1)*4], block)
        assert np.all((block >= 1.0) & (block <= 4.0))

    def test_signal_fixed_across_replicates(self):
        config = small_config()
        np.testing.assert_array_equal(config.signal_vector(), config.signal_vector())

    def test_default_grid(self):
        grid = default_lambda_grid()
        assert grid.size == 10
        assert grid[0] == pytest.approx(0.05)
        assert grid[-1] == pytest.approx(2.0)

    def test_lambda_index_requires_grid_point(self):
        config = small_config()
        assert config.lambda_index(1.0) == 1
        with pytest.raises(SpecError):
            config.lambda_index(0.5)

    def test_hash_stable_and_sensitive(self):
        assert small_config().config_hash() == small_config().config_hash()
        assert small_config().config_hash() != small_config(master_seed=22).config_hash()


class TestRunReplicate:
    def test_huge_lambda_zero_signal_gives_zero_risks(self):
        config = small_config(lambda_grid="0.5,50.0", signal="zero")
        rd, rg, diag = run_replicate(config, 0, 50.0)
        assert rd == 0.0 and rg == 0.0
        assert diag["support_dependent"] == 0

    def test_interpolation_regime_risks_vanish(self):
        # nearly noiseless, tiny penalty, n > p: both fits recover beta0
        config = small_config(n=60, lambda_grid="1e-7,1.0", sigma="1e-9",
                              penalty="lasso")
        rd, rg, _ = run_replicate(config, 0, 1e-7)
        assert rd <= 1e-8 and rg <= 1e-8

    def test_paired_noise_shares_xi(self):
        base = dict(lambda_grid="0.4,1.0", replicates=4)
        paired = small_config(paired_noise="true", **base)
        rd_p, rg_p, _ = run_replicate(paired, 1, 0.4)
        unpaired = small_config(paired_noise="false", **base)
        rd_u, rg_u, _ = run_replicate(unpaired, 1, 0.4)
        # dependent-side draws are identical; only the control's noise changes
        assert rd_p == rd_u
        assert rg_p != rg_u

    def test_diagnostics_fields(self):
        config = small_config(penalty="ridge")
        _, _, diag = run_replicate(config, 0, 1.0)
        assert set(diag) == {"kkt_dependent", "kkt_gaussian",
                             "support_dependent", "support_gaussian",
                             "linf_error"}
        assert diag["linf_error"] > 0


class TestRunExperiment:
    def test_smoke_summary(self):
        config = small_config(replicates=2)
        summary = run_experiment(config)
        assert len(summary.rows) == 2
        for row in summary.rows:
            assert np.isfinite(row.se_dependent) and row.se_dependent >= 0
            assert np.isfinite(row.predicted_risk)
            assert np.isfinite(row.gap_zscore)
        assert summary.failures == 0
        assert summary.cells == 4

    def test_thread_schedule_independent(self):
        config = small_config()
        s1 = run_experiment(config, threads=1)
        s3 = run_experiment(config, threads=3)
        for a, b in zip(s1.rows, s3.rows):
            assert a == b

    def test_paired_noise_variance_reduction(self):
        reps = 30

        def gap_variance(paired):
            config = small_config(paired_noise="true" if paired else "false",
                                  replicates=reps, lambda_grid="0.3",
                                  penalty="ridge", n=80, master_seed=5)
            gaps = []
            for rep in range(reps):
                rd, rg, _ = run_replicate(config, rep, 0.3)
                gaps.append(rd - rg)
            return float(np.var(gaps, ddof=1))

        assert gap_variance(True) <= gap_variance(False)

    def test_tolerates_sparse_failures(self, monkeypatch):
        config = small_config(replicates=12)
        real = experiments_mod.run_replicate

        def flaky(cfg, rep, lam):
            if rep == 0 and lam == 0.3:
                raise NonConvergenceError("injected failure")
            return real(cfg, rep, lam)

        monkeypatch.setattr(experiments_mod, "run_replicate", flaky)
        summary = experiments_mod.run_experiment(config)
        assert summary.failures == 1
        assert summary.diagnostics[0].failures == 1
        assert all(np.isfinite(r.mean_risk_dependent) for r in summary.rows)

    def test_hard_failure_above_ten_percent(self, monkeypatch):
        config = small_config(replicates=4)

        def broken(cfg, rep, lam):
            raise NonConvergenceError("injected failure")

        monkeypatch.setattr(experiments_mod, "run_replicate", broken)
        with pytest.raises(NumericError, match="cells failed"):
            experiments_mod.run_experiment(config)


class TestEmitSummary:
    def test_header_only_for_empty_rows(self, tmp_path):
        summary = ExperimentSummary(rows=[], diagnostics=[], config_hash="x",
                                    wall_time=0.0, failures=0, cells=0)
        path = tmp_path / "empty.csv"
        emit_summary(summary, path)
        assert path.read_text() == SUMMARY_HEADER + "\n"

    def test_single_row_roundtrip(self, tmp_path):
        config = small_config(replicates=2, lambda_grid="1.0")
        summary = run_experiment(config)
        path = tmp_path / "one.csv"
        emit_summary(summary, path)
        lines = path.read_text().strip().split("\n")
        assert lines[0] == SUMMARY_HEADER
        assert len(lines) == 2
        values = [float(v) for v in lines[1].split(",")]
        assert values[0] == 1.0
        assert values[1] == summary.rows[0].mean_risk_dependent

    def test_bit_stable(self, tmp_path):
        config = small_config(replicates=2)
        summary = run_experiment(config)
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        emit_summary(summary, p1)
        emit_summary(run_experiment(config, threads=2), p2)
        assert p1.read_bytes() == p2.read_bytes()


class TestNormalityDiagnostic:
    def test_gaussian_rows_pass_null_level(self):
        spec = DesignSpec("gaussian", 5, 4)
        sampler = isotropic_row_sampler(spec, (3, 1))
        theta = stream(8).standard_normal(20)
        samples = 2000
        ks = normality_diagnostic(sampler, theta, samples)
        assert ks <= 1.36 / np.sqrt(samples)

    def test_concentrated_direction_on_gwas_fails(self):
        spec = DesignSpec("gwas-table", 3, 10)
        sampler = isotropic_row_sampler(spec, (4, 1))
        theta = np.zeros(30)
        theta[0] = 1.0
        ks = normality_diagnostic(sampler, theta, 1000)
        assert ks >= 0.2

    def test_zero_direction_rejected(self):
        spec = DesignSpec("gaussian", 2, 2)
        sampler = isotropic_row_sampler(spec, (5, 1))
        with pytest.raises(SpecError):
            normality_diagnostic(sampler, np.zeros(4), 100)
