import logging

import numpy as np
import pytest

from conftest import MAMMO, MAMMO_FEATURES
from sketchlda.dataset import ArrayRowProvider, LabeledDataset, NpyRowProvider, batched_row_norms, \
    class_statistics, leverage_scores, load_csv, recode, train_test_split
from sketchlda.errors import LoadError, ValidationError


def write(tmp_path, text, name="d.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_load_mammographic_complete_cases():
    ds = load_csv(MAMMO, "Severity", "1", MAMMO_FEATURES)
    assert (ds.n, ds.p) == (830, 4)
    assert ds.feature_names == MAMMO_FEATURES


def test_load_drops_incomplete_rows(tmp_path, caplog):
    path = write(tmp_path, "a,b,y\n1,2,0\n3,,1\n4,5,1\n6,?,0\n7,8,1\n")
    with caplog.at_level(logging.INFO):
        ds = load_csv(path, "y", "1")
    assert ds.n == 3
    np.testing.assert_array_equal(ds.labels, [1, 2, 2])
    assert "dropped 2" in caplog.text


def test_load_row_names_and_numeric_tags(tmp_path):
    path = write(tmp_path, '"date","x","Occupancy"\n"1","2015",1.5,1\n"2","2015",2.5,0\n"3","2015",0.5,1.0\n')
    ds = load_csv(path, "Occupancy", "1", ["x"])
    np.testing.assert_array_equal(ds.labels, [2, 1, 2])
    np.testing.assert_array_equal(ds.features[:, 0], [1.5, 2.5, 0.5])


def test_load_errors(tmp_path):
    with pytest.raises(LoadError, match=r"row 3, column 2"):
        load_csv(write(tmp_path, "a,b,y\n1,2,0\n3,x,1\n"), "y", "1")
    with pytest.raises(LoadError, match="label column"):
        load_csv(write(tmp_path, "a,b\n1,2\n"), "y", "1")
    with pytest.raises(ValidationError, match="one class"):
        load_csv(write(tmp_path, "a,y\n1,1\n2,1\n"), "y", "1")
    with pytest.raises(OSError):
        load_csv(tmp_path / "absent.csv", "y", "1")


def test_recode_values():
    X = np.arange(20.0).reshape(10, 2)
    ds = LabeledDataset(X, [1] * 5 + [2] * 5)
    r = recode(ds)
    assert set(r.y) == {-2.0, 2.0}
    np.testing.assert_array_equal(r.features_aug[:, 0], 1.0)
    np.testing.assert_array_equal(r.features, X)
    r = recode(LabeledDataset(X, [1] * 2 + [2] * 8))
    assert set(r.y) == {-5.0, 1.25}
    assert r.y.sum() == pytest.approx(0.0, abs=1e-12)


def test_class_statistics_hand_example():
    X = np.array([[1.0, 1.0], [1.0, 3.0], [-1.0, -1.0], [-1.0, -3.0]])
    st = class_statistics(LabeledDataset(X, [2, 2, 1, 1]))
    np.testing.assert_allclose(st.centroid2, [1.0, 2.0])
    np.testing.assert_allclose(st.centroid1, [-1.0, -2.0])
    # within-class scatter: each class contributes diag(0, 2); divisor 4 - 2
    np.testing.assert_allclose(st.pooled_cov, [[0.0, 0.0], [0.0, 2.0]])
    assert st.priors == (0.5, 0.5)


def test_class_statistics_identical_rows_and_small_n():
    X = np.array([[1.0, 1.0], [1.0, 1.0], [0.0, 0.0], [2.0, 0.0]])
    st = class_statistics(LabeledDataset(X, [2, 2, 1, 1]))
    np.testing.assert_allclose(st.pooled_cov, [[1.0, 0.0], [0.0, 0.0]])
    with pytest.raises(ValidationError):
        class_statistics(LabeledDataset(np.eye(2), [1, 2]))


def test_class_statistics_matches_numpy(small_ds):
    st = class_statistics(small_ds)
    X, y = small_ds.features, small_ds.labels
    n1, n2 = st.n1, st.n2
    S = ((n1 - 1) * np.cov(X[y == 1].T) + (n2 - 1) * np.cov(X[y == 2].T)) / (n1 + n2 - 2)
    np.testing.assert_allclose(st.pooled_cov, S, rtol=1e-12)


def test_split_sizes_and_determinism():
    ds = LabeledDataset(np.arange(10.0)[:, None], [1, 2] * 5)
    tr, te = train_test_split(ds, 0.8, 3)
    assert (tr.n, te.n) == (8, 2)
    tr2, _ = train_test_split(ds, 0.8, 3)
    np.testing.assert_array_equal(tr.features, tr2.features)
    full = load_csv(MAMMO, "Severity", "1", MAMMO_FEATURES)
    assert train_test_split(full, 0.8, 0)[0].n == 664


def test_split_errors():
    ds = LabeledDataset(np.arange(10.0)[:, None], [1] * 9 + [2])
    with pytest.raises(ValidationError):
        train_test_split(ds, 1.0, 0)
    with pytest.raises(ValidationError, match="class"):
        # one class-2 row; some seed with a 10% training part leaves it out
        for seed in range(50):
            train_test_split(ds, 0.1, seed)


def test_row_norms_examples(caplog):
    out = batched_row_norms(ArrayRowProvider(np.array([[1.0, 0.0], [0.0, 2.0]])))
    np.testing.assert_array_equal(out.values, [1.0, 4.0])
    X = np.random.default_rng(0).normal(size=(6, 3))
    a = batched_row_norms(ArrayRowProvider(X, batch_size=1)).values
    b = batched_row_norms(ArrayRowProvider(X, batch_size=6)).values
    np.testing.assert_array_equal(a, b)
    np.testing.assert_allclose(a, np.sum(X * X, axis=1), rtol=1e-15)
    aug = batched_row_norms(ArrayRowProvider(X, intercept=True), use_intercept_column=True).values
    np.testing.assert_allclose(aug, a + 1.0)
    with caplog.at_level(logging.WARNING):
        z = batched_row_norms(ArrayRowProvider(np.array([[0.0, 0.0], [1.0, 1.0]])))
    assert list(z.zero_rows) == [0]


def test_npy_provider_matches_array(tmp_path):
    X = np.random.default_rng(1).normal(size=(50, 3))
    np.save(tmp_path / "X.npy", X)
    disk = NpyRowProvider(tmp_path / "X.npy", intercept=True, batch_size=7)
    mem = ArrayRowProvider(X, intercept=True)
    idx = np.array([4, 1, 4, 49, 0])
    np.testing.assert_array_equal(disk.rows(idx), mem.rows(idx))
    assert disk.shape == (50, 4)
    np.testing.assert_array_equal(batched_row_norms(disk).values, batched_row_norms(mem).values)


def test_leverage_examples():
    Q, _ = np.linalg.qr(np.random.default_rng(2).normal(size=(4, 4)))
    np.testing.assert_allclose(leverage_scores(Q), 1.0, atol=1e-12)
    X = np.array([[1.0, 2.0], [0.0, 1.0], [3.0, 1.0]])
    H = X @ np.linalg.solve(X.T @ X, X.T)
    np.testing.assert_allclose(leverage_scores(X), np.diag(H), atol=1e-12)
    D = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [2.0, 3.0]])
    lev = leverage_scores(D)
    assert lev[0] == pytest.approx(lev[1], abs=1e-14)
