"""Sketched LDA: randomized Kaczmarz on the recoded least-squares problem.

Sampling probabilities are built from the original features (the intercept
column is left out), while each update normalises by the full augmented row.
Draws come from a Philox counter-based generator keyed on
``(seed, replicate)``; the iterate sequence depends only on that key, not on
the checkpoint schedule or the batch size used to fetch rows.
"""

import logging
import warnings
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
from numba import njit

from .dataset import RowProvider, batched_row_norms, leverage_scores
from .errors import RkRunError, ValidationError
from .lda_ls import LEAST_SQUARES, LinearClassifier
from .linalg import as_vector

log = logging.getLogger(__name__)

UNIFORM = "uniform"
ROW_WEIGHT = "row_weight"
LEVERAGE = "leverage"
SCHEMES = (UNIFORM, ROW_WEIGHT, LEVERAGE)
_ALIASES = {"rownorm": ROW_WEIGHT, "row-weight": ROW_WEIGHT, "row_norm": ROW_WEIGHT}


def canonical_scheme(name):
    name = _ALIASES.get(name, name)
    if name not in SCHEMES:
        raise ValidationError(f"unknown sampling scheme {name!r}; choose from {SCHEMES}")
    return name


class ZeroRowError(ValidationError):
    """Kaczmarz step requested on an all-zero row."""


@dataclass(frozen=True)
class SamplingDistribution:
    scheme: str
    probabilities: np.ndarray
    cumulative: np.ndarray = field(repr=False)

    @property
    def n(self):
        return self.probabilities.shape[0]

    def draw(self, rng, size):
        """Inverse-CDF draw of ``size`` row indices."""
        u = rng.random(size)
        return np.searchsorted(self.cumulative, u, side="right")


def build_sampler(weights, scheme) -> SamplingDistribution:
    """Sampling distribution over rows.

    ``weights`` are squared row norms for ``row_weight``, leverage scores for
    ``leverage``, and only their length matters for ``uniform``.
    """
    scheme = canonical_scheme(scheme)
    w = as_vector(weights, "weights")
    if w.size == 0:
        raise ValidationError("no rows to sample from")
    if scheme == UNIFORM:
        w = np.ones_like(w)
    if np.any(w < 0):
        raise ValidationError("sampling weights must be non-negative")
    total = w.sum()
    if total <= 0:
        raise ValidationError("all sampling weights are zero")
    prob = w / total
    cum = np.minimum(np.cumsum(prob), 1.0)
    last = np.flatnonzero(prob > 0)[-1]
    cum[last:] = 1.0
    prob.setflags(write=False)
    cum.setflags(write=False)
    return SamplingDistribution(scheme, prob, cum)


def sampler_for(provider: RowProvider, scheme) -> SamplingDistribution:
    """Sampler over the rows of ``provider`` using original-feature weights."""
    scheme = canonical_scheme(scheme)
    n = provider.shape[0]
    if scheme == UNIFORM:
        return build_sampler(np.ones(n), UNIFORM)
    if scheme == ROW_WEIGHT:
        return build_sampler(batched_row_norms(provider).values, ROW_WEIGHT)
    # leverage scores need the whole column space at once
    X = provider.rows(np.arange(n), with_intercept=False)
    return build_sampler(leverage_scores(X), LEVERAGE)


def rk_step(beta, x, y, c):
    """One relaxed Kaczmarz projection of ``beta`` towards ``<x, b> = y``."""
    beta = as_vector(beta, "beta")
    x = as_vector(x, "x")
    nrm = float(x @ x)
    if nrm == 0.0:
        raise ZeroRowError("cannot project onto the hyperplane of a zero row")
    return beta + (c * (y - float(x @ beta)) / nrm) * x


@njit(cache=True)
def _sweep(beta, rows, targets, c):
    visited = 0
    m, d = rows.shape
    for t in range(m):
        nrm = 0.0
        dot = 0.0
        for j in range(d):
            nrm += rows[t, j] * rows[t, j]
            dot += rows[t, j] * beta[j]
        if nrm == 0.0:
            continue
        s = c * (targets[t] - dot) / nrm
        for j in range(d):
            beta[j] += s * rows[t, j]
        visited += 1
    return visited


def rk_generator(seed, replicate=0):
    """Philox stream keyed on ``(seed, replicate)``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(replicate)])))


@dataclass(frozen=True)
class RkConfig:
    step_size: float
    iterations: int
    seed: int = 0
    replicate: int = 0
    checkpoints: Tuple[int, ...] = ()

    def __post_init__(self):
        if not self.step_size > 0:
            raise ValidationError(f"step size must be positive, got {self.step_size}")
        if self.step_size > 1:
            warnings.warn(f"step size {self.step_size} > 1 over-relaxes the projection", stacklevel=3)
        if self.iterations < 0:
            raise ValidationError("iteration count must be non-negative")
        cps = sorted({int(k) for k in self.checkpoints} | {int(self.iterations)})
        if cps[0] < 0 or cps[-1] > self.iterations:
            raise ValidationError("checkpoints must lie in [0, iterations]")
        object.__setattr__(self, "iterations", int(self.iterations))
        object.__setattr__(self, "checkpoints", tuple(cps))


@dataclass
class RkRun:
    beta: np.ndarray
    checkpoints: List[Tuple[int, np.ndarray]]
    rows_visited: int
    config: RkConfig = None


def run_rk(provider: RowProvider, y, sampler: SamplingDistribution, config: RkConfig,
           beta0=None, batch_size=None) -> RkRun:
    """Run the Kaczmarz iteration, snapshotting at every configured checkpoint.

    Rows are requested from ``provider`` in batches of sampled indices, so the
    training matrix never has to be resident in memory.
    """
    y = as_vector(y, "y")
    n, d = provider.shape
    if sampler.n != n or y.shape[0] != n:
        raise ValidationError(f"provider has {n} rows, sampler {sampler.n}, labels {y.shape[0]}")
    beta = np.zeros(d) if beta0 is None else as_vector(beta0, "beta0").copy()
    if beta.shape[0] != d:
        raise ValidationError(f"beta0 has length {beta.shape[0]}, rows have {d} entries")
    batch = int(batch_size or provider.batch_size)
    rng = rk_generator(config.seed, config.replicate)
    c = float(config.step_size)

    snaps = []
    k = visited = 0
    for stop in config.checkpoints:
        while k < stop:
            m = min(batch, stop - k)
            idx = sampler.draw(rng, m)
            try:
                rows = np.ascontiguousarray(provider.rows(idx), dtype=float)
            except Exception as exc:
                raise RkRunError(f"row access failed at iteration {k}: {exc}",
                                 snaps[-1] if snaps else (0, beta.copy())) from exc
            visited += _sweep(beta, rows, y[idx], c)
            k += m
        snaps.append((stop, beta.copy()))
    if visited < config.iterations:
        log.warning("skipped %d draws of zero-norm rows", config.iterations - visited)
    return RkRun(beta, snaps, visited, config)


def extract_direction(run_or_beta) -> LinearClassifier:
    """Split an augmented iterate into intercept (first entry) and direction."""
    beta = run_or_beta.beta if isinstance(run_or_beta, RkRun) else as_vector(run_or_beta)
    clf = LinearClassifier(beta[1:].copy(), float(beta[0]), LEAST_SQUARES)
    if not np.any(clf.direction):
        log.warning("sketched direction is the zero vector")
    return clf
