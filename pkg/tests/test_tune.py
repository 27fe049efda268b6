import numpy as np
import pytest

from src.algorithms.booster import BoostParams, predict_classes
from src.algorithms.grid_search import check_grid, format_table, grid_search, kfold_indices
from src.algorithms.logit_gbm import fit_logit_gbm
from src.models.matrix import ColumnSpec, Dataset, FeatureMatrix, LabelVector
from src.models.reports import ParamGrid
from src.utils.errors import ConfigurationError


def make_dataset(X, y):
    X = np.asarray(X, dtype=np.float64)
    columns = tuple(ColumnSpec(f"c{j}", "raw") for j in range(X.shape[1]))
    return Dataset(
        matrix=FeatureMatrix(values=X, columns=columns),
        labels=LabelVector(values=np.asarray(y, dtype=np.int8)),
    )


def noisy_task(n=90, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, 3))
    y = (X[:, 0] - 0.5 * X[:, 1] + rng.normal(scale=0.8, size=n) > 0).astype(np.int8)
    return make_dataset(X, y)


def test_kfold_sizes_and_partition():
    folds = kfold_indices(10, 3, seed=0)
    assert sorted(len(val) for _, val in folds) == [3, 3, 4]
    validated = np.concatenate([val for _, val in folds])
    assert sorted(validated.tolist()) == list(range(10))
    for train, val in folds:
        assert not set(train) & set(val)
        assert len(train) + len(val) == 10


def test_kfold_is_seeded():
    a = kfold_indices(20, 4, seed=1)
    b = kfold_indices(20, 4, seed=1)
    c = kfold_indices(20, 4, seed=2)
    assert all(np.array_equal(x[1], y[1]) for x, y in zip(a, b))
    assert not all(np.array_equal(x[1], y[1]) for x, y in zip(a, c))


@pytest.mark.parametrize("n,k", [(3, 5), (10, 1), (10, 0)])
def test_kfold_rejects_bad_k(n, k):
    with pytest.raises(ConfigurationError):
        kfold_indices(n, k, seed=0)


def test_grid_validation():
    with pytest.raises(ConfigurationError):
        check_grid(ParamGrid((), (2,), (0.1,)))
    with pytest.raises(ConfigurationError):
        check_grid(ParamGrid((10,), (0,), (0.1,)))
    with pytest.raises(ConfigurationError):
        check_grid(ParamGrid((10,), (2,), (0.0,)))


def test_single_cell_grid():
    report = grid_search(noisy_task(), ParamGrid((4,), (2,), (0.1,)), k=3, seed=0)
    assert len(report.cells) == 1
    assert report.best is report.cells[0]
    assert len(report.best.fold_scores) == 3
    assert report.best.mean_score == pytest.approx(np.mean(report.best.fold_scores))


def test_ties_go_to_fewer_estimators_and_shallower_trees():
    # One column, two values: every cell is perfect on every fold.
    data = make_dataset([[0.0]] * 15 + [[1.0]] * 15, [0] * 15 + [1] * 15)
    report = grid_search(data, ParamGrid((3, 1, 2), (3, 1), (0.5,)), k=3, seed=0)
    assert all(cell.mean_score == 1.0 for cell in report.cells)
    assert report.best.params == (1, 1, 0.5)
    assert [c.params for c in report.cells[:3]] == [(1, 1, 0.5), (1, 3, 0.5), (2, 1, 0.5)]


def test_cells_are_sorted_by_mean_score():
    report = grid_search(noisy_task(), ParamGrid((2, 8), (1, 3), (0.1, 0.5)), k=3, seed=4)
    means = [cell.mean_score for cell in report.cells]
    assert means == sorted(means, reverse=True)
    assert report.best.mean_score == max(means)


def test_staged_scores_equal_separate_fits():
    data = noisy_task(seed=1)
    grid = ParamGrid((2, 5, 9), (2,), (0.3,))
    report = grid_search(data, grid, k=3, seed=7)
    folds = kfold_indices(len(data), 3, seed=7)
    for cell in report.cells:
        for (fit_rows, val_rows), score in zip(folds, cell.fold_scores):
            model = fit_logit_gbm(data.take(fit_rows), BoostParams(*cell.params))
            val = data.take(val_rows)
            expected = np.mean(predict_classes(model, val.matrix) == val.labels.values)
            assert score == pytest.approx(expected, abs=1e-12)


def test_grid_search_is_deterministic_and_worker_independent():
    data = noisy_task(seed=2)
    grid = ParamGrid((3, 6), (1, 2), (0.2,))
    a = grid_search(data, grid, k=3, seed=5, n_jobs=1)
    b = grid_search(data, grid, k=3, seed=5, n_jobs=2)
    assert a.to_dict() == b.to_dict()


def test_single_class_folds_fail_their_cells():
    data = make_dataset([[0.0], [1.0], [2.0], [3.0]], [1, 0, 0, 0])
    report = grid_search(data, ParamGrid((2,), (1,), (0.1,)), k=4, seed=0)
    cell = report.cells[0]
    assert cell.failed
    assert "single class" in cell.failure
    assert report.best is None
    assert report.to_dict()["best"] is None
    assert "failed" in format_table(report)


def test_stage_seconds_are_measured_per_stage():
    model = fit_logit_gbm(noisy_task(seed=3), BoostParams(n_estimators=6, max_depth=2))
    assert len(model.stage_seconds) == 6
    assert all(t > 0 for t in model.stage_seconds)
    assert np.all(np.diff(model.stage_seconds) >= 0)


def test_cell_fit_time_grows_with_estimators():
    data = noisy_task(seed=4)
    report = grid_search(data, ParamGrid((2, 8), (2,), (0.3,)), k=3, seed=0)
    seconds = {cell.n_estimators: cell.fit_seconds for cell in report.cells}
    assert 0 < seconds[2] <= seconds[8]
    assert "fit_seconds" not in report.to_dict()["cells"][0]
