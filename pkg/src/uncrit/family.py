"""Linear multiparameter families of grid fields and their parameter distribution.

A realization is ``g[0] + sum_i a[i] * g[i+1]``. Parameters follow a Gaussian,
standard normal by default. Ensembles are brought into this form by an EOF
decomposition whose coefficients are standardized PC scores.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import ConfigError, InputError, NumericalError

log = logging.getLogger(__name__)

__all__ = [
    "LinearFamily",
    "ParameterDistribution",
    "EofResult",
    "evaluate",
    "sample_parameters",
    "split_seed",
    "eof_decompose",
    "qq_table",
    "family_to_dict",
    "family_from_dict",
]


@dataclass(frozen=True, eq=False)
class LinearFamily:
    """Fields ``g`` of shape ``(m + 1, n)``; row 0 is the offset field."""

    g: np.ndarray
    grid_ref: str = ""

    def __post_init__(self):
        g = np.array(self.g, dtype=float, copy=True)
        if g.ndim != 2 or g.shape[0] < 2 or g.shape[1] < 1:
            raise InputError("a family needs g0 and at least one mode over >= 1 vertex")
        if not np.all(np.isfinite(g)):
            raise InputError("family contains non-finite values")
        g.setflags(write=False)
        object.__setattr__(self, "g", g)

    @property
    def m(self) -> int:
        return self.g.shape[0] - 1

    @property
    def n(self) -> int:
        return self.g.shape[1]

    @property
    def g0(self) -> np.ndarray:
        return self.g[0]

    @property
    def modes(self) -> np.ndarray:
        return self.g[1:]


def evaluate(family: LinearFamily, a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.shape[-1] != family.m:
        raise ValueError(f"parameter has dimension {a.shape[-1]}, family expects {family.m}")
    return family.g0 + a @ family.modes


@dataclass(frozen=True, eq=False)
class ParameterDistribution:
    """Gaussian law of the parameter vector; ``cov = factor @ factor.T``."""

    m: int
    mean: np.ndarray | None = None
    factor: np.ndarray | None = None

    def __post_init__(self):
        if self.m < 1:
            raise ConfigError("parameter dimension must be >= 1")
        mean = np.zeros(self.m) if self.mean is None else np.asarray(self.mean, dtype=float).ravel()
        factor = np.eye(self.m) if self.factor is None else np.atleast_2d(np.asarray(self.factor, dtype=float))
        if mean.shape != (self.m,) or factor.shape != (self.m, self.m):
            raise ConfigError("mean/factor dimension does not match m")
        if np.linalg.matrix_rank(factor) < self.m:
            raise ConfigError("covariance factor is rank deficient")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "factor", factor)

    @property
    def kind(self) -> str:
        if np.all(self.mean == 0) and np.array_equal(self.factor, np.eye(self.m)):
            return "standard-normal"
        return "gaussian"

    @property
    def cov(self) -> np.ndarray:
        return self.factor @ self.factor.T

    def is_isotropic(self) -> bool:
        c = self.cov
        return bool(np.all(self.mean == 0) and np.allclose(c, c[0, 0] * np.eye(self.m)))

    def pdf1(self, y):
        """Marginal pdf for m == 1."""
        self._need_1d()
        return stats.norm.pdf(y, loc=self.mean[0], scale=abs(self.factor[0, 0]))

    def cdf1(self, y):
        self._need_1d()
        return stats.norm.cdf(y, loc=self.mean[0], scale=abs(self.factor[0, 0]))

    def _need_1d(self):
        if self.m != 1:
            raise ValueError("1D marginal requested from a multivariate distribution")


def sample_parameters(dist: ParameterDistribution, count: int, seed: int) -> np.ndarray:
    """``count`` parameter vectors as a ``(count, m)`` array.

    Draws come from numpy's PCG64 bit generator with the ziggurat normal
    sampler, so a given ``(seed, count)`` reproduces the same stream.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    z = rng.standard_normal((count, dist.m))
    return dist.mean + z @ dist.factor.T


def split_seed(seed: int, k: int) -> list[int]:
    """Derive ``k`` independent child seeds for sub-streams of a master seed."""
    children = np.random.SeedSequence(seed).spawn(k)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]


# ---------------------------------------------------------------- EOF


@dataclass(frozen=True, eq=False)
class EofResult:
    family: LinearFamily
    explained_variance: np.ndarray
    coefficients: np.ndarray
    singular_values: np.ndarray
    notes: list[str] = field(default_factory=list)


def eof_decompose(ensemble, m: int, weights=None) -> EofResult:
    """EOF analysis of an ``(r, n)`` ensemble keeping ``m`` modes.

    Mode ``i`` is scaled by ``s_i / sqrt(r - 1)`` so the member coefficients are
    standardized PC scores (unit sample variance). ``weights`` is an optional
    per-vertex weight; modes are then orthonormal in the weighted inner product.
    """
    X = np.asarray(ensemble, dtype=float)
    if X.ndim != 2:
        raise InputError("ensemble must be a 2D (members x vertices) matrix")
    if not np.all(np.isfinite(X)):
        raise InputError("ensemble contains non-finite values")
    r, n = X.shape
    if m < 1 or m > min(r - 1, n):
        raise ConfigError(f"m={m} outside [1, min(r - 1, n)] = [1, {min(r - 1, n)}]")

    mean = X.mean(axis=0)
    A = X - mean
    if weights is not None:
        w = np.asarray(weights, dtype=float).ravel()
        if w.shape != (n,) or np.any(w <= 0):
            raise ConfigError("weights must be positive, one per vertex")
        sw = np.sqrt(w)
    else:
        sw = np.ones(n)
    U, s, Vt = np.linalg.svd(A * sw, full_matrices=False)

    notes = []
    # relative to the data scale, so rounding in the mean does not count as variance
    tol = max(r, n) * np.finfo(float).eps * max(s[0] if s.size else 0.0, np.sqrt(r) * float(np.abs(X).max()))
    rank = int(np.sum(s > tol))
    if rank == 0:
        raise NumericalError("ensemble has zero variance: all members identical")
    if rank < m:
        msg = f"centered ensemble has rank {rank} < m={m}; keeping {rank} modes"
        log.warning(msg)
        notes.append(msg)
        m = rank

    scale = np.sqrt(r - 1)
    modes = (s[:m, None] / scale) * Vt[:m] / sw
    coeffs = U[:, :m] * scale
    total = np.sum(s**2)
    explained = s[:m] ** 2 / total
    fam = LinearFamily(np.vstack([mean, modes]))
    return EofResult(fam, explained, coeffs, s[:rank].copy(), notes)


def qq_table(coefficients) -> np.ndarray:
    """Rows ``(k, theoretical quantile, sorted coef mode 1, ..., mode m)``."""
    C = np.sort(np.asarray(coefficients, dtype=float), axis=0)
    r = C.shape[0]
    q = stats.norm.ppf((np.arange(1, r + 1) - 0.5) / r)
    return np.column_stack([np.arange(r), q, C])


# ---------------------------------------------------------------- JSON


def family_to_dict(family: LinearFamily) -> dict:
    return {"m": family.m, "g0": family.g0.tolist(), "modes": family.modes.tolist()}


def family_from_dict(data: dict) -> LinearFamily:
    try:
        g0 = np.asarray(data["g0"], dtype=float)
        modes = np.atleast_2d(np.asarray(data["modes"], dtype=float))
        m = int(data.get("m", len(modes)))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed family JSON: {exc}") from exc
    if g0.size == 0 or modes.size == 0:
        raise InputError("family JSON has an empty g0 or no modes")
    if modes.shape != (m, g0.size):
        raise InputError(f"modes shape {modes.shape} does not match m={m}, n={g0.size}")
    return LinearFamily(np.vstack([g0, modes]))
