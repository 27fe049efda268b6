import math

import numpy as np
import pytest

from src.models.matrix import ColumnSpec, FeatureMatrix, LabelVector
from src.utils.stats_utils import five_number_summary, pearson, pearson_matrix


def type7_quantile(values, p):
    """Order-statistic interpolation at index (n - 1) * p."""
    ordered = sorted(values)
    h = (len(ordered) - 1) * p
    lo = math.floor(h)
    hi = min(lo + 1, len(ordered) - 1)
    return ordered[lo] + (h - lo) * (ordered[hi] - ordered[lo])


def test_five_numbers_of_one_to_five():
    s = five_number_summary([1, 2, 3, 4, 5])
    assert (s.min, s.q1, s.median, s.q3, s.max) == (1, 2, 3, 4, 5)
    assert s.outlier_count == 0


def test_single_value():
    s = five_number_summary([7])
    assert {s.min, s.q1, s.median, s.q3, s.max, s.whisker_low, s.whisker_high} == {7}


def test_zero_iqr_outlier():
    s = five_number_summary([1, 1, 1, 1, 100])
    assert s.q3 == 1
    assert s.whisker_high == 1
    assert s.outlier_count == 1
    assert s.outlier_values == (100.0,)
    assert s.to_dict()["outlier_values"] == [100.0]


def test_empty_column():
    with pytest.raises(ValueError):
        five_number_summary([])


def test_non_finite_column():
    with pytest.raises(ValueError):
        five_number_summary([1.0, float("nan")])


def test_quartiles_match_order_statistic_oracle():
    rng = np.random.default_rng(0)
    for _ in range(200):
        column = rng.integers(0, 50, size=rng.integers(1, 40)).astype(float).tolist()
        s = five_number_summary(column)
        assert s.q1 == pytest.approx(type7_quantile(column, 0.25), abs=1e-12)
        assert s.median == pytest.approx(type7_quantile(column, 0.5), abs=1e-12)
        assert s.q3 == pytest.approx(type7_quantile(column, 0.75), abs=1e-12)
        assert s.min <= s.whisker_low <= s.q1 <= s.median <= s.q3 <= s.whisker_high <= s.max

        # Duplicating the max keeps both ends and re-interpolates the quartiles.
        grown = column + [max(column)]
        g = five_number_summary(grown)
        assert (g.min, g.max) == (s.min, s.max)
        assert g.q3 == pytest.approx(type7_quantile(grown, 0.75), abs=1e-12)


def test_summary_is_permutation_invariant():
    rng = np.random.default_rng(1)
    column = rng.normal(size=51)
    assert five_number_summary(column) == five_number_summary(rng.permutation(column))


def test_pearson_examples():
    assert pearson([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0)
    assert pearson([1, 2, 3], [6, 4, 2]) == pytest.approx(-1.0)
    assert pearson([1, 2, 3], [1, 2, 4]) == pytest.approx(0.9820, abs=1e-4)


def test_pearson_constant_column_is_zero():
    assert pearson([1, 1, 1], [1, 2, 3]) == 0.0


def test_pearson_affine_invariance():
    rng = np.random.default_rng(2)
    a = rng.normal(size=30)
    b = rng.normal(size=30)
    assert pearson(3.0 * a + 7.0, b) == pytest.approx(pearson(a, b), abs=1e-12)
    assert pearson(a, 0.5 * b - 2.0) == pytest.approx(pearson(a, b), abs=1e-12)


def test_pearson_needs_two_rows():
    with pytest.raises(ValueError):
        pearson([1], [2])


def test_correlation_matrix():
    rng = np.random.default_rng(3)
    values = np.column_stack([rng.normal(size=40), np.full(40, 5.0), rng.integers(0, 4, 40)])
    m = FeatureMatrix(
        values=values,
        columns=(ColumnSpec("a", "raw"), ColumnSpec("const", "raw"), ColumnSpec("c", "label")),
    )
    labels = LabelVector(values=rng.integers(0, 2, 40).astype(np.int8))
    corr = pearson_matrix(m, labels)

    assert corr.names == ("a", "const", "c", "income")
    assert np.array_equal(np.diag(corr.values), np.ones(4))
    assert np.array_equal(corr.values, corr.values.T)
    assert np.all(np.abs(corr.values) <= 1.0)
    assert np.all(corr.values[1, [0, 2, 3]] == 0.0)
    assert corr.values[0, 3] == pytest.approx(pearson(values[:, 0], labels.values), abs=1e-12)
    assert set(corr.label_column()) == {"a", "const", "c"}


def test_correlation_matrix_needs_two_rows():
    m = FeatureMatrix(values=np.array([[1.0]]), columns=(ColumnSpec("a", "raw"),))
    with pytest.raises(ValueError):
        pearson_matrix(m)


def test_outlier_values_match_whiskers():
    rng = np.random.default_rng(5)
    for _ in range(50):
        values = np.round(rng.standard_t(2, size=int(rng.integers(5, 80))), 1)
        s = five_number_summary(values)
        beyond = values[(values < s.whisker_low) | (values > s.whisker_high)]
        assert s.outlier_values == tuple(sorted(set(beyond.tolist())))
        assert s.outlier_count == len(beyond)
