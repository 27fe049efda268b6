from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

import src.config as config
from src.models.census import CATEGORICAL, RecordSet
from src.models.matrix import (
    ColumnSpec,
    Dataset,
    EncodingMap,
    FeatureMatrix,
    LabelVector,
    SplitIndex,
)
from src.utils.errors import (
    ConfigurationError,
    EncodingError,
    InputError,
    SplitError,
)
from src.utils.random_utils import fisher_yates, make_rng


def _byte_order(value: str) -> bytes:
    return value.encode("utf-8")


def impute_missing(rs: RecordSet) -> RecordSet:
    """
    Make "?" the one missing-value category.

    Values already stored as "?" are kept as they are; empty strings and nulls in
    categorical columns become "?". Continuous columns are never missing.
    """
    frame = rs.frame.copy()
    for spec in rs.categorical:
        column = frame[spec.name]
        blank = column.isna() | (column.astype(str).str.strip() == "")
        if blank.any():
            frame[spec.name] = column.where(~blank, config.MISSING_MARKER)
    return RecordSet(frame=frame, attributes=rs.attributes, label=rs.label)


def drop_features(rs: RecordSet, ids: Iterable[str]) -> RecordSet:
    """Remove the attributes named by feature id (e.g. {"F9", "F14"})."""
    ids = list(ids)
    present = rs.by_id()
    for attr_id in ids:
        if attr_id not in present:
            raise ConfigurationError(
                f"feature id '{attr_id}' is unknown or already dropped "
                f"(present: {', '.join(present)})"
            )
    if not ids:
        return rs

    dropped = {present[attr_id].name for attr_id in ids}
    attributes = tuple(a for a in rs.attributes if a.name not in dropped)
    frame = rs.frame.drop(columns=sorted(dropped))
    return RecordSet(frame=frame, attributes=attributes, label=rs.label)


def fit_label_encoding(rs: RecordSet) -> EncodingMap:
    """Sort each categorical attribute's values byte-wise and code them from 0."""
    if len(rs) == 0:
        raise InputError("cannot fit an encoding on an empty RecordSet")
    categories = {}
    for spec in rs.categorical:
        values = rs.frame[spec.name].unique()
        categories[spec.name] = tuple(sorted((str(v) for v in values), key=_byte_order))
    return EncodingMap(categories=categories)


def find_unseen(rs: RecordSet, encoding: EncodingMap) -> Dict[int, Tuple[str, str]]:
    """Row position -> (attribute, value) for the first unseen category of each row."""
    unseen: Dict[int, Tuple[str, str]] = {}
    for spec in rs.categorical:
        if spec.name not in encoding.categories:
            raise ConfigurationError(f"encoding has no categories for '{spec.name}'")
        column = rs.frame[spec.name]
        known = column.isin(encoding.categories[spec.name]).to_numpy()
        for row in np.nonzero(~known)[0]:
            unseen.setdefault(int(row), (spec.name, str(column.iloc[row])))
    return unseen


def apply_label_encoding(rs: RecordSet, encoding: EncodingMap) -> FeatureMatrix:
    """
    One column per attribute: raw values for continuous attributes, integer codes
    for categorical ones.
    """
    columns: List[ColumnSpec] = []
    values: List[np.ndarray] = []
    for spec in rs.attributes:
        column = rs.frame[spec.name]
        if spec.kind == CATEGORICAL:
            if spec.name not in encoding.categories:
                raise ConfigurationError(f"encoding has no categories for '{spec.name}'")
            codes = pd.Categorical(
                column, categories=list(encoding.categories[spec.name])
            ).codes
            bad = np.nonzero(codes < 0)[0]
            if len(bad):
                raise EncodingError(spec.name, str(column.iloc[bad[0]]))
            values.append(codes.astype(np.float64))
            columns.append(ColumnSpec(source=spec.name, encoding="label"))
        else:
            values.append(column.to_numpy(dtype=np.float64))
            columns.append(ColumnSpec(source=spec.name, encoding="raw"))

    matrix = np.column_stack(values) if values else np.empty((len(rs), 0))
    return FeatureMatrix(values=matrix, columns=tuple(columns))


def decode_label_encoding(m: FeatureMatrix, encoding: EncodingMap) -> Dict[str, List[str]]:
    """Map every label-encoded column back to its category strings."""
    decoded = {}
    for j, col in enumerate(m.columns):
        if col.encoding == "label":
            cats = encoding.categories[col.source]
            decoded[col.source] = [cats[int(code)] for code in m.values[:, j]]
    return decoded


def one_hot_expand(m: FeatureMatrix, encoding: EncodingMap) -> FeatureMatrix:
    """
    Expand every categorical column with more than two categories into one
    indicator per category. Two-category attributes (sex) stay a single 0/1 column.
    """
    columns: List[ColumnSpec] = []
    values: List[np.ndarray] = []
    for j, col in enumerate(m.columns):
        if col.encoding == "onehot":
            raise ConfigurationError("matrix is already one-hot expanded")
        if col.encoding == "raw" or len(encoding.categories[col.source]) <= 2:
            columns.append(col)
            values.append(m.values[:, j])
            continue
        codes = m.values[:, j]
        for code, category in enumerate(encoding.categories[col.source]):
            columns.append(ColumnSpec(source=col.source, encoding="onehot", category=category))
            values.append((codes == code).astype(np.float64))

    matrix = np.column_stack(values) if values else np.empty((m.n_rows, 0))
    return FeatureMatrix(values=matrix, columns=tuple(columns))


def encode_labels(rs: RecordSet) -> LabelVector:
    if not rs.has_labels:
        raise InputError("records carry no labels")
    positive = (rs.frame[rs.label.name] == rs.label.positive).to_numpy()
    return LabelVector(values=positive.astype(np.int8))


def split_boundary(n: int, ratio: float) -> int:
    """round-half-up(ratio * n)."""
    return int(np.floor(ratio * n + 0.5))


def _uncovered_category(m: FeatureMatrix, train_rows: np.ndarray) -> Optional[str]:
    train = m.values[train_rows]
    for j, col in enumerate(m.columns):
        if col.encoding == "onehot":
            if m.values[:, j].any() and not train[:, j].any():
                return col.label
        elif col.encoding == "label":
            full = np.unique(m.values[:, j])
            seen = np.unique(train[:, j])
            if len(seen) < len(full):
                missing = np.setdiff1d(full, seen)
                return f"{col.source} code {int(missing[0])}"
    return None


def shuffle_split(
    m: FeatureMatrix,
    labels: LabelVector,
    ratio: float = config.SPLIT_RATIO,
    seed: int = config.SEED,
    max_retries: int = config.COVERAGE_RETRIES,
) -> Tuple[Dataset, Dataset, SplitIndex]:
    """
    Shuffle rows with a seeded Fisher-Yates permutation and split at round(ratio * n).

    Every category present in the full matrix must appear in the train part; if not,
    the seed is incremented and the rows reshuffled, up to `max_retries` attempts.
    """
    if not 0.0 < ratio < 1.0:
        raise ConfigurationError(f"ratio must be in (0, 1), got {ratio}")
    n = m.n_rows
    if n != len(labels):
        raise InputError(f"matrix has {n} rows but {len(labels)} labels")
    boundary = split_boundary(n, ratio)
    if boundary < 1 or boundary >= n:
        raise ConfigurationError(
            f"ratio {ratio} on {n} rows leaves an empty train or test set"
        )

    last_gap = None
    for attempt in range(max_retries):
        attempt_seed = seed + attempt
        perm = fisher_yates(n, make_rng(attempt_seed))
        last_gap = _uncovered_category(m, perm[:boundary])
        if last_gap is None:
            index = SplitIndex(
                seed=attempt_seed,
                permutation=perm,
                boundary=boundary,
                requested_seed=seed,
                attempts=attempt + 1,
            )
            data = Dataset(matrix=m, labels=labels)
            return data.take(index.train_rows), data.take(index.test_rows), index

    raise SplitError(
        f"no split covered every category after {max_retries} attempts "
        f"(last missing: {last_gap})"
    )


@dataclass(frozen=True)
class EncodedData:
    """Output of the full encoding pipeline, before splitting."""

    label_encoded: FeatureMatrix
    expanded: FeatureMatrix
    labels: LabelVector
    encoding: EncodingMap
    dropped: Tuple[str, ...]


def encode_records(rs: RecordSet, drop: Sequence[str] = config.DROPPED_FEATURES) -> EncodedData:
    """Missing-value category, feature drop, label encoding and one-hot expansion."""
    records = drop_features(impute_missing(rs), drop)
    encoding = fit_label_encoding(records)
    label_encoded = apply_label_encoding(records, encoding)
    return EncodedData(
        label_encoded=label_encoded,
        expanded=one_hot_expand(label_encoded, encoding),
        labels=encode_labels(records),
        encoding=encoding,
        dropped=tuple(drop),
    )


def export_matrix_csv(m: FeatureMatrix, labels: Optional[LabelVector], path: str) -> None:
    """Write the matrix with its column descriptors as the header row."""
    frame = pd.DataFrame(m.values, columns=m.column_names)
    if labels is not None:
        frame[config.LABEL_NAME] = labels.values
    frame.to_csv(path, index=False)
