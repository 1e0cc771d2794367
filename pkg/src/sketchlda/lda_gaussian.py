"""Two-class Gaussian-model LDA: sphering plus nearest-centroid classification."""

from dataclasses import dataclass

import numpy as np

from .dataset import ClassStats, LabeledDataset, class_statistics
from .errors import SingularCovarianceError, ValidationError
from .linalg import EPS, SymEig, as_vector, sym_eig

TIE_TOL = 1e-12


@dataclass(frozen=True)
class GaussianLdaModel:
    stats: ClassStats
    sphering: SymEig
    sphered_centroids: tuple
    gm_direction: np.ndarray

    @property
    def p(self):
        return self.gm_direction.shape[0]

    @property
    def whitener(self):
        """``D^{-1/2} V^T``; maps a feature vector to sphered coordinates."""
        w, V = self.sphering
        return V.T / np.sqrt(w)[:, None]

    def sphere(self, X):
        return np.asarray(X, dtype=float) @ self.whitener.T

    def unit_within_direction(self):
        """GM direction rescaled so the within-class variance of the score is one.

        This is the normalisation used by common statistics packages (e.g. the
        ``scaling`` returned by R's ``MASS::lda``) and is what published
        coefficient tables usually report.
        """
        d = self.gm_direction
        return d / np.sqrt(d @ self.stats.pooled_cov @ d)

    def decision_offset(self):
        """Intercept making ``x @ gm_direction + offset > 0`` the Bayes rule."""
        s = self.stats
        mid = 0.5 * (s.centroid1 + s.centroid2)
        return float(-mid @ self.gm_direction + np.log(s.priors[1] / s.priors[0]))


def fit_gaussian(ds: LabeledDataset) -> GaussianLdaModel:
    stats = class_statistics(ds)
    eig = sym_eig(stats.pooled_cov)
    w, V = eig
    threshold = ds.p * EPS * max(w[0], 0.0)
    if w[-1] <= threshold:
        raise SingularCovarianceError(float(w[-1]), float(threshold))
    W = V.T / np.sqrt(w)[:, None]
    mu1s, mu2s = W @ stats.centroid1, W @ stats.centroid2
    direction = V @ ((V.T @ stats.mean_difference) / w)
    return GaussianLdaModel(stats, eig, (mu1s, mu2s), direction)


def sphered_discriminants(model: GaussianLdaModel, x):
    """``(delta*_1, delta*_2)``: half squared sphered distance minus log prior."""
    xs = model.whitener @ x
    pri = model.stats.priors
    mu1s, mu2s = model.sphered_centroids
    d1 = 0.5 * np.sum((xs - mu1s) ** 2) - np.log(pri[0])
    d2 = 0.5 * np.sum((xs - mu2s) ** 2) - np.log(pri[1])
    return float(d1), float(d2)


def classify_gaussian(model: GaussianLdaModel, x):
    """Return ``(label, delta*_1, delta*_2)``; near-ties go to class 1."""
    x = as_vector(x, "x")
    if x.shape[0] != model.p:
        raise ValidationError(f"query has {x.shape[0]} features, model has {model.p}")
    d1, d2 = sphered_discriminants(model, x)
    label = 2 if d2 < d1 and abs(d1 - d2) >= TIE_TOL else 1
    return label, d1, d2


def predict_gaussian(model: GaussianLdaModel, X):
    """Vectorised :func:`classify_gaussian` labels for the rows of ``X``."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != model.p:
        raise ValidationError(f"expected an (N, {model.p}) array")
    Z = model.sphere(X)
    mu1s, mu2s = model.sphered_centroids
    pri = model.stats.priors
    d1 = 0.5 * np.sum((Z - mu1s) ** 2, axis=1) - np.log(pri[0])
    d2 = 0.5 * np.sum((Z - mu2s) ** 2, axis=1) - np.log(pri[1])
    return np.where((d2 < d1) & (np.abs(d1 - d2) >= TIE_TOL), 2, 1)
