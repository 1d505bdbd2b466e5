"""Shared fixtures: the four bundled experiment runs are expensive, so they
are computed once per session and reused by the acceptance criteria."""
from __future__ import annotations

import os
import sys
import time
from importlib import resources

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from blockreg import config_from_mapping, run_experiment
from blockreg.fileio import read_config

THREADS = min(4, os.cpu_count() or 1)


def bundled_config_path(name: str) -> str:
    return str(resources.files("blockreg.configs").joinpath(f"{name}.cfg"))


def _run_bundled(name: str):
    config = config_from_mapping(read_config(bundled_config_path(name)))
    start = time.monotonic()
    summary = run_experiment(config, threads=THREADS)
    elapsed = time.monotonic() - start
    return config, summary, elapsed


@pytest.fixture(scope="session")
def additive_lasso_run():
    return _run_bundled("additive_lasso")


@pytest.fixture(scope="session")
def additive_ridge_run():
    return _run_bundled("additive_ridge")


@pytest.fixture(scope="session")
def functional_lasso_run():
    return _run_bundled("functional_lasso")


@pytest.fixture(scope="session")
def functional_ridge_run():
    return _run_bundled("functional_ridge")
