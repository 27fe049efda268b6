import numpy as np
import pandas as pd
import pytest

from src.models.census import RecordSet
from src.models.matrix import ColumnSpec, EncodingMap, FeatureMatrix, LabelVector
from src.utils.errors import ConfigurationError, EncodingError, SplitError
from src.utils.preprocess_utils import (
    apply_label_encoding,
    decode_label_encoding,
    drop_features,
    encode_records,
    export_matrix_csv,
    fit_label_encoding,
    impute_missing,
    one_hot_expand,
    shuffle_split,
    split_boundary,
)
from src.utils.random_utils import fisher_yates, make_rng


def test_impute_keeps_question_mark(records):
    imputed = impute_missing(records)
    assert imputed.frame.equals(records.frame)
    assert "?" in set(imputed.frame["workclass"])


def test_impute_fills_blanks(records):
    frame = records.frame.copy()
    frame.loc[0, "occupation"] = ""
    filled = impute_missing(RecordSet(frame=frame, attributes=records.attributes))
    assert filled.frame.loc[0, "occupation"] == "?"


def test_drop_features(records):
    dropped = drop_features(records, ["F9", "F14"])
    assert len(dropped.attributes) == 12
    assert "race" not in dropped.frame.columns
    assert "native-country" not in dropped.frame.columns
    assert drop_features(records, []) is records


def test_drop_twice_is_an_error(records):
    once = drop_features(records, ["F1"])
    with pytest.raises(ConfigurationError):
        drop_features(once, ["F1"])


def test_drop_unknown_id(records):
    with pytest.raises(ConfigurationError):
        drop_features(records, ["F99"])


def test_label_encoding_is_byte_ordered(records):
    encoding = fit_label_encoding(records)
    assert encoding.categories["sex"] == ("Female", "Male")
    assert encoding.code("workclass", "?") == 0
    # digits sort before "?", "?" before capitals
    assert encoding.categories["education"][0] == "11th"
    for cats in encoding.categories.values():
        assert list(cats) == sorted(cats, key=lambda v: v.encode("utf-8"))
        assert len(set(cats)) == len(cats)


def test_single_category_gets_code_zero(records):
    frame = records.frame.copy()
    frame["sex"] = "Male"
    encoding = fit_label_encoding(RecordSet(frame=frame, attributes=records.attributes))
    assert encoding.categories["sex"] == ("Male",)


def test_label_encoding_round_trip(records):
    encoding = fit_label_encoding(records)
    matrix = apply_label_encoding(records, encoding)
    assert matrix.n_columns == 14
    decoded = decode_label_encoding(matrix, encoding)
    for spec in records.categorical:
        assert decoded[spec.name] == list(records.frame[spec.name])


def test_unseen_category(records):
    encoding = fit_label_encoding(records)
    frame = records.frame.copy()
    frame.loc[3, "workclass"] = "Xyz"
    with pytest.raises(EncodingError) as info:
        apply_label_encoding(RecordSet(frame=frame, attributes=records.attributes), encoding)
    assert info.value.attribute == "workclass"
    assert info.value.value == "Xyz"


def test_one_hot_expansion(records):
    data = encode_records(records)
    encoding = data.encoding
    assert data.label_encoded.n_columns == 12

    expected = 6 + 1 + sum(
        len(encoding.categories[name])
        for name in ("workclass", "education", "marital-status", "occupation", "relationship")
    )
    m = data.expanded
    assert m.n_columns == expected
    assert m.n_rows == len(records)

    sex = [j for j, c in enumerate(m.columns) if c.source == "sex"]
    assert len(sex) == 1
    assert set(np.unique(m.values[:, sex[0]])) <= {0.0, 1.0}

    for name in ("workclass", "education", "occupation"):
        group = [j for j, c in enumerate(m.columns) if c.source == name]
        assert np.all(m.values[:, group].sum(axis=1) == 1.0)

    raw = [j for j, c in enumerate(m.columns) if c.encoding == "raw"]
    raw_src = [j for j, c in enumerate(data.label_encoded.columns) if c.encoding == "raw"]
    assert np.array_equal(m.values[:, raw], data.label_encoded.values[:, raw_src])


def test_one_hot_without_categoricals():
    m = FeatureMatrix(
        values=np.array([[1.0, 2.0], [3.0, 4.0]]),
        columns=(ColumnSpec("a", "raw"), ColumnSpec("b", "raw")),
    )
    expanded = one_hot_expand(m, EncodingMap(categories={}))
    assert expanded.columns == m.columns
    assert np.array_equal(expanded.values, m.values)


def test_split_boundary():
    assert split_boundary(48842, 0.8) == 39074
    assert 48842 - split_boundary(48842, 0.8) == 9768
    assert split_boundary(10, 0.8) == 8


def test_fisher_yates_is_a_seeded_bijection():
    a = fisher_yates(100, make_rng(7))
    b = fisher_yates(100, make_rng(7))
    c = fisher_yates(100, make_rng(8))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert sorted(a.tolist()) == list(range(100))


def test_make_rng_rejects_negative_seed():
    with pytest.raises(ValueError):
        make_rng(-1)


def _small_matrix(n=10):
    values = np.arange(n * 2, dtype=np.float64).reshape(n, 2)
    return FeatureMatrix(values=values, columns=(ColumnSpec("a", "raw"), ColumnSpec("b", "raw")))


def test_shuffle_split_sizes_and_bijection():
    m = _small_matrix()
    labels = LabelVector(values=np.array([0, 1] * 5, dtype=np.int8))
    train, test, index = shuffle_split(m, labels, 0.8, seed=3)
    assert (len(train), len(test)) == (8, 2)
    assert sorted(index.permutation.tolist()) == list(range(10))
    assert set(index.train_rows) | set(index.test_rows) == set(range(10))
    assert not set(index.train_rows) & set(index.test_rows)


def test_shuffle_split_only_reorders(records):
    data = encode_records(records)
    train, test, _ = shuffle_split(data.expanded, data.labels, 0.8, seed=11)
    stacked = np.vstack([train.matrix.values, test.matrix.values])
    original = data.expanded.values
    assert np.array_equal(
        stacked[np.lexsort(stacked.T[::-1])], original[np.lexsort(original.T[::-1])]
    )
    assert train.labels.values.sum() + test.labels.values.sum() == data.labels.values.sum()


def test_shuffle_split_is_deterministic(records):
    data = encode_records(records)
    _, _, a = shuffle_split(data.expanded, data.labels, 0.8, seed=5)
    _, _, b = shuffle_split(data.expanded, data.labels, 0.8, seed=5)
    assert a.to_dict() == b.to_dict()


def test_split_covers_every_category(records):
    data = encode_records(records)
    train, _, _ = shuffle_split(data.expanded, data.labels, 0.8, seed=0)
    for j, col in enumerate(data.expanded.columns):
        if col.encoding == "onehot":
            assert train.matrix.values[:, j].any(), col.label


def test_coverage_retry_moves_to_next_seed():
    # The single row holding category "b" must land in the two-row train part.
    values = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    m = FeatureMatrix(
        values=values,
        columns=(ColumnSpec("c", "onehot", "a"), ColumnSpec("c", "onehot", "b")),
    )
    labels = LabelVector(values=np.array([0, 1, 0], dtype=np.int8))
    _, _, index = shuffle_split(m, labels, 0.5, seed=0)
    assert index.requested_seed == 0
    assert index.seed == index.requested_seed + index.attempts - 1
    assert 2 in index.train_rows

    # Two single-row categories cannot both fit in a one-row train part.
    impossible = FeatureMatrix(
        values=np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]),
        columns=(ColumnSpec("c", "onehot", "a"), ColumnSpec("c", "onehot", "b")),
    )
    with pytest.raises(SplitError) as info:
        shuffle_split(impossible, labels, 0.2, seed=0, max_retries=5)
    assert info.value.exit_code == 1


def test_ratio_out_of_range():
    m = _small_matrix()
    labels = LabelVector(values=np.zeros(10, dtype=np.int8))
    for ratio in (0.0, 1.0, 1.5):
        with pytest.raises(ConfigurationError):
            shuffle_split(m, labels, ratio)


def test_export_matrix_csv(records, tmp_path):
    data = encode_records(records)
    path = tmp_path / "features.csv"
    export_matrix_csv(data.expanded, data.labels, str(path))
    frame = pd.read_csv(path)
    assert list(frame.columns) == data.expanded.column_names + ["income"]
    assert len(frame) == len(records)
