import logging

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sketchlda.dataset import LabeledDataset
from sketchlda.lda_ls import LinearClassifier
from sketchlda.linalg import sym_eig
from sketchlda.metrics import DegenerateMetricError, accuracy_report, angle_degrees, \
    coefficient_scaling, pca2


def test_angle_examples():
    assert angle_degrees([1.0, 2.0], [1.0, 2.0]) == 0.0
    assert angle_degrees([1.0, 0.0], [0.0, 3.0]) == pytest.approx(90.0)
    assert angle_degrees([1.0, 0.0], [-1.0, 0.0]) == pytest.approx(180.0)
    with pytest.raises(DegenerateMetricError):
        angle_degrees([0.0, 0.0], [1.0, 0.0])


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 100_000), st.floats(1e-6, 1e6))
def test_angle_scale_invariant(seed, lam):
    rng = np.random.default_rng(seed)
    u, v = rng.normal(size=4), rng.normal(size=4)
    a = angle_degrees(u, v)
    assert 0.0 <= a <= 180.0
    assert angle_degrees(u, lam * v) == pytest.approx(a, abs=1e-9)


def test_accuracy_examples():
    X = np.array([[-2.0], [-1.0], [1.0], [2.0], [3.0]])
    test = LabeledDataset(X, [1, 1, 2, 2, 2])
    perfect = LinearClassifier(np.array([1.0]), 0.0)
    assert tuple(accuracy_report(perfect, test)) == (1.0, 1.0, 1.0)
    always2 = LinearClassifier(np.array([0.0]), 1.0)
    assert accuracy_report(always2, test).overall == pytest.approx(0.6)
    only2 = LabeledDataset(X[2:], [2, 2, 2], require_both_classes=False)
    rep = accuracy_report(perfect, only2)
    assert rep.class1 is None and rep.class2 == 1.0


def test_coefficient_scaling():
    np.testing.assert_allclose(coefficient_scaling([2.0, 3.0, 1.0], [1.0, 1.5, 0.0]), [2.0, 2.0, np.nan])


def test_pca_line_and_isotropic(caplog):
    t = np.linspace(-1, 1, 20)
    with caplog.at_level(logging.WARNING):
        s = pca2(np.c_[t, 2 * t, -t])
    assert np.all(s[:, 1] == 0.0) and "rank" in caplog.text
    rng = np.random.default_rng(0)
    s = pca2(rng.normal(size=(20_000, 2)))
    v = s.var(axis=0, ddof=1)
    assert v[0] / v[1] == pytest.approx(1.0, abs=0.05)


def test_pca_matches_eigendecomposition():
    X = np.array([[2.0, 0.0, 1.0], [1.0, 3.0, 0.0], [0.0, 1.0, 4.0], [5.0, 2.0, 2.0], [1.0, 1.0, 1.0]])
    s = pca2(X)
    Xc = X - X.mean(0)
    w, V = sym_eig(Xc.T @ Xc / 4)
    np.testing.assert_allclose(np.abs(s), np.abs(Xc @ V[:, :2]), atol=1e-12)
    np.testing.assert_allclose(s.var(axis=0, ddof=1), w[:2], rtol=1e-6)
