"""Datasets, label recoding, class statistics and row access.

Class tags are always ``1`` and ``2``; the designated positive class of a
source file becomes class 2, so the discriminant direction points from
class 1 towards class 2.
"""

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import LoadError, ValidationError
from .linalg import as_matrix, thin_svd_left

log = logging.getLogger(__name__)

MISSING = {"", "?", "NA", "NaN", "nan"}


@dataclass(frozen=True)
class LabeledDataset:
    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple = ()
    require_both_classes: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        X = as_matrix(self.features, "features")
        y = np.asarray(self.labels).astype(int).reshape(-1)
        if y.shape[0] != X.shape[0]:
            raise ValidationError(f"{y.shape[0]} labels for {X.shape[0]} rows")
        if not np.isin(y, (1, 2)).all():
            raise ValidationError("labels must be 1 or 2")
        if self.require_both_classes and not ((y == 1).any() and (y == 2).any()):
            raise ValidationError("both classes must be present")
        names = tuple(self.feature_names) or tuple(f"x{j + 1}" for j in range(X.shape[1]))
        if len(names) != X.shape[1]:
            raise ValidationError(f"{len(names)} feature names for {X.shape[1]} columns")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "feature_names", names)

    @property
    def n(self):
        return self.features.shape[0]

    @property
    def p(self):
        return self.features.shape[1]

    @property
    def counts(self):
        return int(np.sum(self.labels == 1)), int(np.sum(self.labels == 2))

    def subset(self, idx, require_both_classes=True):
        return LabeledDataset(
            self.features[idx], self.labels[idx], self.feature_names, require_both_classes
        )


@dataclass(frozen=True)
class RecodedDataset:
    """Augmented design ``[1, X]`` and responses ``-n/n1`` / ``+n/n2``."""

    features_aug: np.ndarray
    y: np.ndarray

    @property
    def features(self):
        return self.features_aug[:, 1:]


@dataclass(frozen=True)
class ClassStats:
    n1: int
    n2: int
    priors: tuple
    centroid1: np.ndarray
    centroid2: np.ndarray
    pooled_cov: np.ndarray

    @property
    def n(self):
        return self.n1 + self.n2

    @property
    def mean_difference(self):
        return self.centroid2 - self.centroid1


def _cell_value(raw, row, col, colname, path):
    try:
        return float(raw)
    except ValueError:
        raise LoadError(
            f"{path}: cannot parse {raw!r} as a number at row {row}, column {col} ({colname})"
        ) from None


def _same_tag(a, b):
    if a.strip() == b.strip():
        return True
    try:
        return float(a) == float(b)
    except ValueError:
        return False


def load_csv(path, label_column, positive_class, feature_columns: Optional[Sequence[str]] = None):
    """Load a labelled CSV file.

    Rows with an empty or ``?`` cell in any used column are dropped.  Rows
    with one more field than the header (R-style row names) have their first
    field discarded.  ``feature_columns`` defaults to every column except the
    label column.  Rows whose label equals ``positive_class`` become class 2.
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise LoadError(f"{path}: empty file") from None
        if label_column not in header:
            raise LoadError(f"{path}: label column {label_column!r} not in header {header}")
        if feature_columns is None:
            feature_columns = [h for h in header if h != label_column]
        missing_cols = [c for c in feature_columns if c not in header]
        if missing_cols:
            raise LoadError(f"{path}: feature columns {missing_cols} not in header")
        fidx = [header.index(c) for c in feature_columns]
        lidx = header.index(label_column)

        rows, tags, dropped = [], [], 0
        for lineno, fields in enumerate(reader, start=2):
            if not fields:
                continue
            if len(fields) == len(header) + 1:
                fields = fields[1:]
            if len(fields) != len(header):
                raise LoadError(f"{path}: row {lineno} has {len(fields)} fields, expected {len(header)}")
            used = [fields[i].strip() for i in fidx] + [fields[lidx].strip()]
            if any(u in MISSING for u in used):
                dropped += 1
                continue
            rows.append([
                _cell_value(fields[i].strip(), lineno, i + 1, header[i], path) for i in fidx
            ])
            tags.append(fields[lidx].strip())

    if dropped:
        log.info("%s: dropped %d incomplete rows", path, dropped)
    if not rows:
        raise LoadError(f"{path}: no complete rows")
    labels = np.array([2 if _same_tag(t, str(positive_class)) else 1 for t in tags])
    if not ((labels == 1).any() and (labels == 2).any()):
        raise ValidationError(
            f"{path}: only one class present (positive class tag {positive_class!r})"
        )
    return LabeledDataset(np.array(rows, dtype=float), labels, tuple(feature_columns))


def recode(ds: LabeledDataset) -> RecodedDataset:
    n1, n2 = ds.counts
    n = ds.n
    y = np.where(ds.labels == 1, -n / n1, n / n2)
    Xc = np.hstack([np.ones((n, 1)), ds.features])
    return RecodedDataset(Xc, y)


def class_statistics(ds: LabeledDataset) -> ClassStats:
    """Priors, class centroids and the pooled covariance with divisor ``n - 2``."""
    n = ds.n
    if n <= 2:
        raise ValidationError(f"need more than 2 observations, got {n}")
    X1 = ds.features[ds.labels == 1]
    X2 = ds.features[ds.labels == 2]
    m1, m2 = X1.mean(axis=0), X2.mean(axis=0)
    R1, R2 = X1 - m1, X2 - m2
    S = (R1.T @ R1 + R2.T @ R2) / (n - 2)
    S = 0.5 * (S + S.T)
    n1, n2 = len(X1), len(X2)
    return ClassStats(n1, n2, (n1 / n, n2 / n), m1, m2, S)


def train_test_split(ds: LabeledDataset, train_fraction, seed):
    """Unstratified random split; the training part gets ``ceil(fraction * n)`` rows."""
    if not 0.0 < train_fraction < 1.0:
        raise ValidationError(f"train fraction must lie in (0, 1), got {train_fraction}")
    n_train = math.ceil(round(train_fraction * ds.n, 9))
    perm = np.random.Generator(np.random.PCG64(seed)).permutation(ds.n)
    tr, te = np.sort(perm[:n_train]), np.sort(perm[n_train:])
    y_tr = ds.labels[tr]
    if not ((y_tr == 1).any() and (y_tr == 2).any()):
        raise ValidationError("split leaves a class without training rows")
    # a small test part may legitimately miss a class
    return ds.subset(tr), ds.subset(te, require_both_classes=False)


# ---------------------------------------------------------------------------
# row access


class RowProvider:
    """Random access to the rows of a design matrix, optionally with a
    leading intercept entry of 1.

    Subclasses implement :meth:`_fetch`; everything else goes through
    :meth:`rows` so a backing store only ever has to deliver a batch of
    feature rows.
    """

    intercept = False
    batch_size = 4096

    @property
    def shape(self):
        n, p = self._shape()
        return n, p + int(self.intercept)

    def _shape(self):
        raise NotImplementedError

    def _fetch(self, idx):
        raise NotImplementedError

    def rows(self, idx, with_intercept=None):
        idx = np.asarray(idx, dtype=np.intp)
        block = np.asarray(self._fetch(idx), dtype=float)
        if with_intercept is None:
            with_intercept = self.intercept
        if with_intercept:
            block = np.hstack([np.ones((len(idx), 1)), block])
        return block

    def row(self, i):
        return self.rows([i])[0]

    def batches(self, with_intercept=False):
        n = self._shape()[0]
        for start in range(0, n, self.batch_size):
            idx = np.arange(start, min(start + self.batch_size, n))
            yield idx, self.rows(idx, with_intercept=with_intercept)


class ArrayRowProvider(RowProvider):
    def __init__(self, X, intercept=False, batch_size=4096):
        self._X = as_matrix(X)
        self.intercept = intercept
        self.batch_size = int(batch_size)

    def _shape(self):
        return self._X.shape

    def _fetch(self, idx):
        return self._X[idx]


class NpyRowProvider(RowProvider):
    """Rows served from a memory-mapped ``.npy`` file; nothing is loaded eagerly."""

    def __init__(self, path, intercept=False, batch_size=4096):
        self.path = Path(path)
        self._X = np.load(self.path, mmap_mode="r")
        if self._X.ndim != 2:
            raise ValidationError(f"{path}: expected a 2-D array")
        self.intercept = intercept
        self.batch_size = int(batch_size)

    def _shape(self):
        return self._X.shape

    def _fetch(self, idx):
        # fancy indexing on a memmap is fastest on sorted indices
        order = np.argsort(idx, kind="stable")
        out = np.empty((len(idx), self._X.shape[1]))
        out[order] = self._X[idx[order]]
        return out


class RowNorms(NamedTuple):
    values: np.ndarray
    zero_rows: np.ndarray


def batched_row_norms(provider: RowProvider, use_intercept_column=False) -> RowNorms:
    """Squared row norms computed one batch at a time.

    By default the intercept entry is excluded, i.e. the norms are over the
    original features only.
    """
    n = provider.shape[0]
    if n == 0:
        raise ValidationError("empty row provider")
    out = np.empty(n)
    for idx, block in provider.batches(with_intercept=use_intercept_column and provider.intercept):
        out[idx] = np.einsum("ij,ij->i", block, block)
    zero = np.flatnonzero(out == 0.0)
    if zero.size:
        log.warning("%d zero-norm rows; they are unreachable under row-weight sampling", zero.size)
    return RowNorms(out, zero)


def leverage_scores(X) -> np.ndarray:
    """Squared row norms of an orthonormal basis of the column space of ``X``."""
    U = thin_svd_left(X)
    return np.einsum("ij,ij->i", U, U)
