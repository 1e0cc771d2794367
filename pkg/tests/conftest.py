import numpy as np
import pytest

from sketchlda.dataset import LabeledDataset

DATA_DIR = __import__("pathlib").Path(__file__).resolve().parent.parent / "data"
MAMMO = DATA_DIR / "mammographic.csv"
MAMMO_FEATURES = ("Age", "Shape", "Margin", "Density")


def gaussian_dataset(rng, n, p, shift=1.5, balance=0.5):
    """Two Gaussian classes with a shared random covariance."""
    n2 = int(np.clip(round(balance * n), 2, n - 2))
    n1 = n - n2
    A = rng.normal(size=(p, p)) + np.eye(p) * 1.5
    mu = rng.normal(size=p) * shift
    X1 = rng.normal(size=(n1, p)) @ A.T
    X2 = rng.normal(size=(n2, p)) @ A.T + mu
    X = np.vstack([X1, X2]) + rng.normal(size=p) * 3
    y = np.r_[np.ones(n1, int), np.full(n2, 2)]
    return LabeledDataset(X, y)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def small_ds(rng):
    return gaussian_dataset(rng, 120, 3)
