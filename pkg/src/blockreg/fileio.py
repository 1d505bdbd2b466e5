"""Plain-text file formats.

Matrices are row-major CSV without a header; vectors are one value per line.
All floats are rendered with 17 significant digits so round-trips are exact.
Design specs and experiment configs are flat key=value text.  A spectrum file
is a two-column CSV (mu0_i, omega_i) whose first line carries the aspect
ratio and noise level as ``ratio=...,sigma=...``.
"""
from __future__ import annotations

import numpy as np

from .asymptotics import SignalSpectrum
from .designs import DesignSpec, block_uniform_lambda
from .errors import DataError, SpecError

FLOAT_FMT = ".17g"


def _fmt(v: float) -> str:
    return format(float(v), FLOAT_FMT)


def write_matrix(path, matrix: np.ndarray) -> None:
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    lines = [",".join(_fmt(v) for v in row) for row in matrix]
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def read_matrix(path) -> np.ndarray:
    try:
        with open(path) as fh:
            rows = [line.strip() for line in fh if line.strip()]
        data = [[float(v) for v in row.split(",")] for row in rows]
    except (OSError, ValueError) as exc:
        raise DataError(f"cannot read matrix from {path}: {exc}") from exc
    if not data:
        raise DataError(f"empty matrix file {path}")
    widths = {len(row) for row in data}
    if len(widths) != 1:
        raise DataError(f"ragged rows in matrix file {path}")
    return np.asarray(data, dtype=float)


def write_vector(path, vector: np.ndarray) -> None:
    vector = np.asarray(vector, dtype=float).ravel()
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(_fmt(v) for v in vector) + "\n")


def read_vector(path) -> np.ndarray:
    try:
        with open(path) as fh:
            values = [float(line.strip()) for line in fh if line.strip()]
    except (OSError, ValueError) as exc:
        raise DataError(f"cannot read vector from {path}: {exc}") from exc
    return np.asarray(values, dtype=float)


def _parse_kv(path) -> dict[str, str]:
    entries: dict[str, str] = {}
    try:
        with open(path) as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise DataError(f"{path}:{lineno}: expected key=value, got {line!r}")
                key, value = line.split("=", 1)
                key = key.strip()
                if key in entries:
                    raise DataError(f"{path}:{lineno}: duplicate key {key!r}")
                entries[key] = value.strip()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    return entries


def write_design_spec(path, spec: DesignSpec, seed: int, lambda_mode: str,
                      sigma: float = 1.0) -> None:
    """Sidecar describing how a design file was produced."""
    lines = [
        f"family={spec.family}",
        f"p0={spec.p0}",
        f"d={spec.d}",
        f"seed={seed}",
        f"lambda_mode={lambda_mode}",
        f"sigma={_fmt(sigma)}",
    ]
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def read_design_spec(path) -> tuple[DesignSpec, int, str, float]:
    """Rebuild (spec, seed, lambda_mode, sigma) from a sidecar file."""
    entries = _parse_kv(path)
    known = {"family", "p0", "d", "seed", "lambda_mode", "sigma"}
    unknown = set(entries) - known
    if unknown:
        raise SpecError(f"unknown design spec keys: {sorted(unknown)}")
    missing = {"family", "p0", "d", "seed"} - set(entries)
    if missing:
        raise SpecError(f"missing design spec keys: {sorted(missing)}")
    try:
        p0 = int(entries["p0"])
        d = int(entries["d"])
        seed = int(entries["seed"])
        sigma = float(entries.get("sigma", 1.0))
    except ValueError as exc:
        raise DataError(f"malformed design spec value: {exc}") from exc
    lambda_mode = entries.get("lambda_mode", "ones")
    if lambda_mode == "ones":
        lambda_diag = None
    elif lambda_mode == "block-uniform":
        lambda_diag = block_uniform_lambda(p0, d, seed)
    else:
        raise SpecError(f"unknown lambda_mode {lambda_mode!r}")
    spec = DesignSpec(entries["family"], p0, d, lambda_diag)
    return spec, seed, lambda_mode, sigma


def write_spectrum(path, spectrum: SignalSpectrum) -> None:
    lines = [f"ratio={_fmt(spectrum.ratio)},sigma={_fmt(spectrum.sigma)}"]
    lines += [f"{_fmt(m)},{_fmt(w)}" for m, w in zip(spectrum.mu0, spectrum.omega)]
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def read_spectrum(path) -> SignalSpectrum:
    try:
        with open(path) as fh:
            lines = [line.strip() for line in fh if line.strip()]
    except OSError as exc:
        raise DataError(f"cannot read spectrum from {path}: {exc}") from exc
    if not lines:
        raise DataError(f"empty spectrum file {path}")
    header: dict[str, float] = {}
    try:
        for item in lines[0].split(","):
            key, value = item.split("=", 1)
            header[key.strip()] = float(value)
    except ValueError as exc:
        raise DataError(f"malformed spectrum header {lines[0]!r}: {exc}") from exc
    if set(header) != {"ratio", "sigma"}:
        raise DataError(f"spectrum header must carry ratio and sigma, got {lines[0]!r}")
    pairs = []
    try:
        for line in lines[1:]:
            m, w = line.split(",")
            pairs.append((float(m), float(w)))
    except ValueError as exc:
        raise DataError(f"malformed spectrum row: {exc}") from exc
    mu0 = np.array([p[0] for p in pairs])
    omega = np.array([p[1] for p in pairs])
    return SignalSpectrum(mu0=mu0, omega=omega, ratio=header["ratio"],
                          sigma=header["sigma"])


def read_config(path) -> dict[str, str]:
    """Flat key=value experiment config; validation happens downstream."""
    return _parse_kv(path)
