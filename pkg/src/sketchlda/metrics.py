"""Comparison metrics: angles between directions, accuracies, coefficient ratios, PCA."""

import logging
import math
from typing import NamedTuple, Optional

import numpy as np

from .errors import ValidationError
from .lda_gaussian import GaussianLdaModel, predict_gaussian
from .linalg import as_matrix, as_vector, sym_eig

log = logging.getLogger(__name__)

ZERO_DIRECTION = 1e-12


class DegenerateMetricError(ValidationError):
    pass


def angle_degrees(u, v):
    """Angle between two directions in degrees, in ``[0, 180]``."""
    u = as_vector(u, "u")
    v = as_vector(v, "v")
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu < ZERO_DIRECTION or nv < ZERO_DIRECTION:
        raise DegenerateMetricError("angle with a zero vector is undefined")
    # 2 atan2(|a - b|, |a + b|) equals arccos(a.b) for unit a, b but keeps
    # full precision near 0 and 180 degrees
    a, b = u / nu, v / nv
    return math.degrees(2.0 * math.atan2(np.linalg.norm(a - b), np.linalg.norm(a + b)))


class AccuracyReport(NamedTuple):
    overall: float
    class1: Optional[float]
    class2: Optional[float]


def predict(clf, X):
    if isinstance(clf, GaussianLdaModel):
        return predict_gaussian(clf, X)
    return clf.predict(X)


def accuracy_report(clf, test) -> AccuracyReport:
    """Overall and per-class accuracy; a class absent from ``test`` gets ``None``."""
    if test.n == 0:
        raise ValidationError("empty test set")
    pred = predict(clf, test.features)
    hit = pred == test.labels
    per = []
    for k in (1, 2):
        mask = test.labels == k
        per.append(float(hit[mask].mean()) if mask.any() else None)
    return AccuracyReport(float(hit.mean()), per[0], per[1])


def coefficient_scaling(reference, candidate):
    """Per-coefficient ratio ``reference / candidate`` (NaN where the candidate is 0)."""
    reference = as_vector(reference)
    candidate = as_vector(candidate)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(candidate != 0, reference / candidate, np.nan)


def pca2(X):
    """Scores on the first two principal components of the centred data.

    Mirrors R's ``prcomp`` defaults: centred, not scaled, variances with
    divisor ``n - 1``.
    """
    X = as_matrix(X)
    n, p = X.shape
    if n < 2:
        raise ValidationError("PCA needs at least two rows")
    Xc = X - X.mean(axis=0)
    w, V = sym_eig(Xc.T @ Xc / (n - 1))
    scores = np.zeros((n, 2))
    k = min(2, p)
    scores[:, :k] = Xc @ V[:, :k]
    tol = max(n, p) * np.finfo(float).eps * max(w[0], 0.0)
    if k < 2 or w[1] <= tol:
        log.warning("data have rank < 2; second principal component set to zero")
        scores[:, 1] = 0.0
    return scores
