"""Least-squares LDA with the fitted or the optimal intercept."""

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .dataset import ClassStats, RecodedDataset
from .errors import DegenerateDirectionError, ValidationError
from .linalg import as_vector, numerical_rank, solve_least_squares

LEAST_SQUARES = "least_squares"
OPTIMAL = "optimal"


class RankDeficiencyWarning(UserWarning):
    pass


@dataclass(frozen=True)
class LinearClassifier:
    """Rule: class 2 iff ``x @ direction + intercept > 0``."""

    direction: np.ndarray
    intercept: float
    intercept_kind: str = LEAST_SQUARES

    @property
    def p(self):
        return self.direction.shape[0]

    @property
    def degenerate(self):
        return not np.linalg.norm(self.direction) > 1e-12

    def decision_values(self, X):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.p:
            raise ValidationError(f"expected an (N, {self.p}) array")
        return X @ self.direction + self.intercept

    def predict(self, X):
        return np.where(self.decision_values(X) > 0, 2, 1)

    def with_optimal_intercept(self, stats: ClassStats):
        return replace(self, intercept=optimal_intercept(self.direction, stats), intercept_kind=OPTIMAL)


def fit_ls(rds: RecodedDataset) -> LinearClassifier:
    """Least-squares fit of the recoded labels on ``[1, X]``."""
    Xc = rds.features_aug
    if numerical_rank(Xc) < Xc.shape[1]:
        warnings.warn(
            "augmented design is rank deficient; returning the minimum-norm solution",
            RankDeficiencyWarning,
            stacklevel=2,
        )
    beta = solve_least_squares(Xc, rds.y)
    return LinearClassifier(beta[1:], float(beta[0]), LEAST_SQUARES)


def optimal_intercept(direction, stats: ClassStats):
    """Intercept minimising the expected misclassification rate under the
    shared-covariance Gaussian model, for a fixed ``direction``."""
    b = as_vector(direction, "direction")
    proj_diff = float(stats.mean_difference @ b)
    if abs(proj_diff) <= 1e-12:
        raise DegenerateDirectionError(
            "direction is orthogonal to the centroid difference; optimal intercept undefined"
        )
    spread = float(b @ (stats.pooled_cov @ b))
    mid = 0.5 * (stats.centroid1 + stats.centroid2)
    return float(-mid @ b + spread / proj_diff * np.log(stats.n2 / stats.n1))


def classify_linear(clf: LinearClassifier, x):
    x = as_vector(x, "x")
    if x.shape[0] != clf.p:
        raise ValidationError(f"query has {x.shape[0]} features, classifier has {clf.p}")
    return 2 if float(x @ clf.direction) + clf.intercept > 0 else 1
