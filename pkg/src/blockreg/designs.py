"""Block-dependent design sampling and the linear response model.

A design row is built block by block: coordinates inside a block may be
dependent, coordinates in different blocks are independent, and the finished
row is scaled coordinatewise by the square root of a diagonal second-moment
matrix.  Four row families are provided:

``gaussian``
    i.i.d. standard normal entries; the matched control for the others.
``additive-trig``
    each block is the first ``d`` trigonometric basis functions evaluated at
    one Uniform(0,1) draw, so entries are dependent but exactly isotropic.
``functional-block``
    each block is ``d`` independent Rademacher signs times one shared
    three-point amplitude ``V`` (P(V=0)=1/2, P(V=+/-sqrt(2))=1/4), giving
    uncorrelated yet dependent unit-variance entries.
``gwas-table``
    each block is one row of the ``2d``-outcome sign table scaled by sqrt(d):
    uniform outcome j picks coordinate ceil(j/2) with sign (-1)^(j+1).

Sampling is addressed by integer key tuples (see :mod:`blockreg.streams`):
row ``i`` of ``sample_design(spec, n, key)`` draws from ``stream(*key, i)``,
so generation order (or parallelism) never changes the result.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, SpecError
from .streams import stream

FAMILIES = ("gaussian", "additive-trig", "functional-block", "gwas-table")
ISOTROPIC_FAMILIES = ("additive-trig", "gwas-table")

# three-point amplitude law of the functional-block family
V_VALUES = (-np.sqrt(2.0), 0.0, np.sqrt(2.0))
V_PROBS = (0.25, 0.5, 0.25)


@dataclass(frozen=True)
class BlockStructure:
    """A partition of {0,...,p-1} into dependence blocks of size <= d_max."""

    blocks: tuple[tuple[int, ...], ...]
    d_max: int

    def __post_init__(self):
        if self.d_max <= 0:
            raise SpecError("d_max must be positive")
        seen = set()
        for block in self.blocks:
            if len(block) == 0 or len(block) > self.d_max:
                raise SpecError(f"block size {len(block)} outside (0, {self.d_max}]")
            if seen.intersection(block):
                raise SpecError("blocks are not disjoint")
            seen.update(block)
        if seen != set(range(len(seen))) or (self.blocks and max(seen) != len(seen) - 1):
            raise SpecError("blocks do not partition a contiguous index range")

    @property
    def p(self) -> int:
        return sum(len(b) for b in self.blocks)

    @classmethod
    def contiguous(cls, p0: int, d: int) -> "BlockStructure":
        """Block j owns indices {j*d, ..., (j+1)*d - 1}."""
        blocks = tuple(tuple(range(j * d, (j + 1) * d)) for j in range(p0))
        return cls(blocks=blocks, d_max=d)


@dataclass
class DesignSpec:
    """How to sample one design row: family, block layout, and scale.

    ``lambda_diag`` is the diagonal of the row second-moment matrix; the raw
    isotropic row is multiplied by its square root coordinatewise.
    """

    family: str
    p0: int
    d: int
    lambda_diag: np.ndarray | None = None
    inner_law: tuple = (V_VALUES, V_PROBS)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise SpecError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.p0 <= 0 or self.d <= 0:
            raise SpecError("p0 and d must be positive")
        if self.family == "additive-trig" and self.d % 2 != 0:
            raise SpecError("additive-trig needs even d (cos/sin pairs)")
        if self.lambda_diag is None:
            self.lambda_diag = np.ones(self.p, dtype=float)
        self.lambda_diag = np.asarray(self.lambda_diag, dtype=float)
        if self.lambda_diag.shape != (self.p,):
            raise SpecError(f"lambda_diag must have length p = p0*d = {self.p}")
        if not np.all(np.isfinite(self.lambda_diag)) or np.any(self.lambda_diag <= 0):
            raise SpecError("lambda_diag entries must be positive and finite")
        if self.family in ISOTROPIC_FAMILIES and not np.all(self.lambda_diag == 1.0):
            raise SpecError(f"{self.family} is isotropic; lambda_diag must be all ones")

    @property
    def p(self) -> int:
        return self.p0 * self.d

    def structure(self) -> BlockStructure:
        return BlockStructure.contiguous(self.p0, self.d)

    def gaussian_control(self) -> "DesignSpec":
        """The matched Gaussian design: same shape and lambda_diag."""
        return DesignSpec("gaussian", self.p0, self.d, self.lambda_diag.copy())


def block_uniform_lambda(p0: int, d: int, seed) -> np.ndarray:
    """lambda_diag built from one size-d block with sqrt entries ~ Unif(1,2).

    The block is drawn once from ``stream(*seed_key, LAMBDA_TAG)`` and
    replicated across all p0 blocks, so it is held fixed for a whole
    experiment keyed by the same seed.
    """
    from .streams import LAMBDA_TAG

    key = seed if isinstance(seed, tuple) else (seed,)
    sqrt_block = stream(*key, LAMBDA_TAG).uniform(1.0, 2.0, size=d)
    return np.tile(sqrt_block**2, p0)


def trig_row(x: float, d: int) -> np.ndarray:
    """First d trigonometric basis functions at x in [0,1], constant dropped.

    Entry 2k-2 is sqrt(2)*cos(2*pi*k*x) and entry 2k-1 is sqrt(2)*sin(2*pi*k*x)
    for k = 1..d/2.  Over x ~ Uniform(0,1) the entries have mean zero and
    identity second moment.
    """
    if d <= 0 or d % 2 != 0:
        raise SpecError("trig_row needs a positive even d")
    if not 0.0 <= x <= 1.0:
        raise DataError(f"trig_row argument {x} outside [0, 1]")
    return _trig_blocks(np.asarray([x], dtype=float), d)[0]


def _trig_blocks(xs: np.ndarray, d: int) -> np.ndarray:
    """Vectorized trig_row: (p0,) points -> (p0, d) blocks."""
    k = np.arange(1, d // 2 + 1, dtype=float)
    ang = 2.0 * np.pi * np.outer(xs, k)
    out = np.empty((xs.size, d))
    out[:, 0::2] = np.sqrt(2.0) * np.cos(ang)
    out[:, 1::2] = np.sqrt(2.0) * np.sin(ang)
    return out


def gwas_block_row(d: int, rng: np.random.Generator) -> np.ndarray:
    """One block of the 2d-outcome table, scaled to identity covariance.

    Outcome j (uniform on 1..2d) sets coordinate ceil(j/2) to sqrt(d) with
    sign +1 for odd j and -1 for even j; all other coordinates are zero.
    """
    if d <= 0:
        raise SpecError("d must be positive")
    j = int(rng.integers(1, 2 * d + 1))
    out = np.zeros(d)
    out[(j + 1) // 2 - 1] = np.sqrt(d) * (1.0 if j % 2 == 1 else -1.0)
    return out


def functional_block_row(d: int, v_law, rng: np.random.Generator) -> np.ndarray:
    """d Rademacher signs times a single shared amplitude V.

    Entries have mean zero, unit variance, and zero pairwise correlation, but
    are dependent through the common factor: E[W_j^2 W_k^2] = E[V^4] = 2.
    """
    if d <= 0:
        raise SpecError("d must be positive")
    values, probs = v_law if v_law is not None else (V_VALUES, V_PROBS)
    v = float(rng.choice(values, p=probs))
    signs = 2.0 * rng.integers(0, 2, size=d) - 1.0
    return v * signs


def _sample_row(spec: DesignSpec, rng: np.random.Generator) -> np.ndarray:
    if spec.family == "gaussian":
        return rng.standard_normal(spec.p)
    if spec.family == "additive-trig":
        xs = rng.random(spec.p0)
        return _trig_blocks(xs, spec.d).ravel()
    if spec.family == "functional-block":
        values, probs = spec.inner_law
        vs = rng.choice(values, p=probs, size=spec.p0)
        signs = 2.0 * rng.integers(0, 2, size=spec.p) - 1.0
        return np.repeat(vs, spec.d) * signs
    # gwas-table
    js = rng.integers(1, 2 * spec.d + 1, size=spec.p0)
    row = np.zeros(spec.p)
    coords = np.arange(spec.p0) * spec.d + (js + 1) // 2 - 1
    row[coords] = np.sqrt(spec.d) * np.where(js % 2 == 1, 1.0, -1.0)
    return row


def sample_design(spec: DesignSpec, n: int, key) -> tuple[np.ndarray, BlockStructure]:
    """Sample an n x p design with i.i.d. block-dependent rows.

    Parameters
    ----------
    spec : DesignSpec
    n : number of rows
    key : int or tuple of ints
        Stream key prefix; row i draws from ``stream(*key, i)``.  Passing
        ``(master_seed, replicate)`` gives the per-row keying
        (master_seed, replicate, row).

    Returns
    -------
    (x, structure) : the sampled matrix (rows already scaled by
        sqrt(lambda_diag)) and the block partition it was built from.
    """
    if n <= 0:
        raise SpecError("n must be positive")
    key = key if isinstance(key, tuple) else (key,)
    scale = np.sqrt(spec.lambda_diag)
    x = np.empty((n, spec.p))
    for i in range(n):
        x[i] = _sample_row(spec, stream(*key, i))
    x *= scale
    return x, spec.structure()


def isotropic_row_sampler(spec: DesignSpec, key):
    """Row sampler for the raw isotropic rows (before lambda scaling).

    Returns a callable ``sampler(i) -> row`` used by normality diagnostics,
    which work on the unit-covariance scale.
    """
    key = key if isinstance(key, tuple) else (key,)

    def sampler(i: int) -> np.ndarray:
        return _sample_row(spec, stream(*key, i))

    return sampler


def simulate_responses(design: np.ndarray, beta0: np.ndarray, noise_sigma: float,
                       rng: np.random.Generator, noise_law: str = "gaussian"):
    """Draw noise and responses y = design @ beta0 + xi.

    ``noise_law`` is "gaussian" or "rademacher" (bounded noise with the same
    variance, for robustness checks).  Returns (y, xi) so callers can reuse
    the noise across design families.
    """
    design = np.asarray(design, dtype=float)
    beta0 = np.asarray(beta0, dtype=float)
    if design.ndim != 2 or beta0.shape != (design.shape[1],):
        raise DataError(f"design {design.shape} and beta0 {beta0.shape} are inconsistent")
    if noise_sigma < 0:
        raise SpecError("noise_sigma must be non-negative")
    n = design.shape[0]
    if noise_law == "gaussian":
        xi = noise_sigma * rng.standard_normal(n)
    elif noise_law == "rademacher":
        xi = noise_sigma * (2.0 * rng.integers(0, 2, size=n) - 1.0)
    else:
        raise SpecError(f"unknown noise law {noise_law!r}")
    return design @ beta0 + xi, xi


@dataclass(frozen=True)
class SignalSpec:
    """Recipe for the true coefficient vector.

    ``bernoulli-scaled`` puts n^{-1/2} on a fair-coin subset of coordinates,
    ``zero`` is the null signal, and ``custom`` carries an explicit vector.
    """

    kind: str = "bernoulli-scaled"
    values: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in ("bernoulli-scaled", "zero", "custom"):
            raise SpecError(f"unknown signal kind {self.kind!r}")
        if self.kind == "custom" and self.values is None:
            raise SpecError("custom signal needs explicit values")

    def draw(self, p: int, n: int, key) -> np.ndarray:
        """Materialize the signal; drawn once per experiment from its key."""
        from .streams import SIGNAL_TAG

        if self.kind == "zero":
            return np.zeros(p)
        if self.kind == "custom":
            values = np.asarray(self.values, dtype=float)
            if values.shape != (p,):
                raise SpecError(f"custom signal has length {values.shape}, expected {p}")
            return values.copy()
        key = key if isinstance(key, tuple) else (key,)
        bits = stream(*key, SIGNAL_TAG).integers(0, 2, size=p)
        return bits / np.sqrt(n)


@dataclass
class Dataset:
    """A sampled design with responses; y = x @ beta0 + xi holds exactly."""

    x: np.ndarray
    y: np.ndarray
    beta0: np.ndarray
    xi: np.ndarray
    lambda_diag: np.ndarray
    structure: BlockStructure

    def __post_init__(self):
        n, p = self.x.shape
        if self.y.shape != (n,) or self.xi.shape != (n,):
            raise DataError("y and xi must have one entry per design row")
        if self.beta0.shape != (p,) or self.lambda_diag.shape != (p,):
            raise DataError("beta0 and lambda_diag must have one entry per column")
        if self.structure.p != p:
            raise DataError("block structure does not cover all columns")

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]


def make_dataset(spec: DesignSpec, n: int, beta0: np.ndarray, sigma: float,
                 design_key, noise_rng: np.random.Generator) -> Dataset:
    """Sample a design and its responses into one Dataset."""
    x, structure = sample_design(spec, n, design_key)
    y, xi = simulate_responses(x, beta0, sigma, noise_rng)
    return Dataset(x=x, y=y, beta0=np.asarray(beta0, float), xi=xi,
                   lambda_diag=spec.lambda_diag.copy(), structure=structure)
