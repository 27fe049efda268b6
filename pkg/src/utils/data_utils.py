import io
import json
import os
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

import src.config as config
from src.models.census import (
    ADULT_SCHEMA,
    CATEGORICAL,
    CONTINUOUS,
    AttributeSpec,
    LabelSpec,
    RecordSet,
    SchemaReport,
)
from src.utils.errors import ConfigurationError, InputError, ParseError

DATA_SUFFIXES = (".data", ".test")


def resolve_data_paths(paths: Sequence[str]) -> List[str]:
    """
    Expand the --data arguments into a list of files.

    A directory contributes its *.data and *.test files in name order.
    """
    if not paths:
        raise InputError("empty input: no data files given")

    resolved = []
    for path in paths:
        if os.path.isdir(path):
            found = sorted(
                os.path.join(path, name)
                for name in os.listdir(path)
                if name.endswith(DATA_SUFFIXES)
                and os.path.isfile(os.path.join(path, name))
            )
            if not found:
                raise InputError(f"directory '{path}' holds no *.data or *.test files")
            resolved.extend(found)
        elif os.path.isfile(path):
            resolved.append(path)
        else:
            raise InputError(f"data file '{path}' not found")
    return resolved


def _scan_lines(
    path: str, n_attributes: int, require_label: bool
) -> Tuple[List[str], List[int], np.ndarray]:
    """
    Keep the data lines of one file with their 1-based line numbers and field
    counts. Lines starting with '|' and blank lines are skipped.
    """
    allowed = {n_attributes + 1} if require_label else {n_attributes, n_attributes + 1}
    lines, line_nos, widths = [], [], []
    try:
        with open(path, "r", encoding="utf-8") as f:
            for line_no, raw in enumerate(f, start=1):
                line = raw.strip()
                if not line or line.startswith(config.COMMENT_PREFIX):
                    continue
                width = line.count(",") + 1
                if width not in allowed:
                    raise ParseError(
                        f"expected {n_attributes + 1} fields, found {width}", path, line_no
                    )
                lines.append(line)
                line_nos.append(line_no)
                widths.append(width)
    except OSError as e:
        raise InputError(f"cannot read data file '{path}': {e}") from e
    except UnicodeDecodeError as e:
        raise InputError(f"data file '{path}' is not UTF-8 text: {e}") from e
    return lines, line_nos, np.asarray(widths, dtype=np.int64)


def read_rows(
    path: str,
    schema: Sequence[AttributeSpec],
    label: LabelSpec,
    require_label: bool = True,
) -> Optional[pd.DataFrame]:
    """
    Read one census file into a frame with one column per attribute plus the
    label column (None on rows that carry no label).

    Every field is trimmed and trailing periods are stripped from labels. Bad
    values raise ParseError naming the first offending line. Returns None when
    the file holds no data lines.
    """
    lines, line_nos, widths = _scan_lines(path, len(schema), require_label)
    if not lines:
        return None

    names = [spec.name for spec in schema] + [label.name]
    frame = pd.read_csv(
        io.StringIO("\n".join(lines)),
        header=None,
        names=names,
        dtype=str,
        keep_default_na=False,
        skipinitialspace=True,
    )
    frame = frame.fillna("").apply(lambda column: column.str.strip())

    # (row position, column order, message); the earliest row wins
    problems = []
    for order, spec in enumerate(schema):
        if spec.kind != CONTINUOUS:
            continue
        numbers = pd.to_numeric(frame[spec.name], errors="coerce").astype(np.float64)
        bad = ~np.isfinite(numbers) | (numbers < 0)
        if bad.any():
            pos = int(np.flatnonzero(bad.to_numpy())[0])
            value = frame[spec.name].iloc[pos]
            if np.isnan(numbers.iloc[pos]):
                message = f"non-numeric value '{value}' for continuous attribute '{spec.name}'"
            else:
                message = f"value {value} for '{spec.name}' must be finite and non-negative"
            problems.append((pos, order, message))
        frame[spec.name] = numbers

    labelled = widths == len(schema) + 1
    raw_labels = frame[label.name]
    stripped = raw_labels.str.rstrip(".")
    bad = labelled & ~stripped.isin([label.negative, label.positive]).to_numpy()
    if bad.any():
        pos = int(np.flatnonzero(bad)[0])
        problems.append((pos, len(schema), f"unknown label '{raw_labels.iloc[pos]}'"))

    if problems:
        pos, _, message = min(problems)
        raise ParseError(message, path, line_nos[pos])

    frame[label.name] = pd.Series(
        np.where(labelled, stripped.to_numpy(dtype=object), None), dtype=object
    )
    return frame


def load_dataset(
    paths: Sequence[str],
    schema: Sequence[AttributeSpec] = ADULT_SCHEMA,
    label: LabelSpec = LabelSpec(),
    require_label: bool = True,
) -> RecordSet:
    """
    Parse census files into one RecordSet.

    Args:
        paths: Files in UCI Adult layout, concatenated in the given order
        schema: Attribute layout of every row
        label: Label column name and its two values
        require_label: When False rows may omit the label (scoring input)

    Returns:
        RecordSet with continuous columns as float64 and categorical columns as str
    """
    if not paths:
        raise InputError("empty input: no data files given")

    frames = [read_rows(path, schema, label, require_label) for path in paths]
    frames = [frame for frame in frames if frame is not None]
    if not frames:
        raise InputError("empty input: no data rows in " + ", ".join(paths))
    frame = pd.concat(frames, ignore_index=True)

    # Labels are kept only when every row carries one.
    if frame[label.name].isna().any():
        frame = frame.drop(columns=[label.name])

    return RecordSet(frame=frame, attributes=tuple(schema), label=label)


def profile(rs: RecordSet) -> SchemaReport:
    """Row count, distinct categories ("?" counted as one) and missing counts."""
    if len(rs) == 0:
        raise InputError("cannot profile an empty RecordSet")

    distinct_counts: Dict[str, int] = {}
    missing_counts: Dict[str, int] = {}
    for spec in rs.attributes:
        column = rs.frame[spec.name]
        if spec.kind == CATEGORICAL:
            distinct_counts[spec.name] = int(column.nunique(dropna=False))
            missing_counts[spec.name] = int((column == config.MISSING_MARKER).sum())
        else:
            missing_counts[spec.name] = 0

    label_counts: Dict[str, int] = {}
    if rs.has_labels:
        counts = rs.frame[rs.label.name].value_counts()
        label_counts = {
            name: int(counts.get(name, 0))
            for name in (rs.label.negative, rs.label.positive)
        }

    return SchemaReport(
        row_count=len(rs),
        distinct_counts=distinct_counts,
        missing_counts=missing_counts,
        label_counts=label_counts,
    )


def load_schema(path: str) -> Tuple[Tuple[AttributeSpec, ...], LabelSpec]:
    """
    Read a schema-definition file:
        {"attributes": [{"id": "F1", "name": "age", "kind": "continuous"}, ...],
         "label": {"name": "income", "negative": "<=50K", "positive": ">50K"}}
    """
    try:
        with open(path, "r") as f:
            data = json.load(f)
        attributes = tuple(
            AttributeSpec(id=str(a["id"]), name=str(a["name"]), kind=str(a["kind"]))
            for a in data["attributes"]
        )
        label_data = data.get("label", {})
        label = LabelSpec(
            name=label_data.get("name", config.LABEL_NAME),
            negative=label_data.get("negative", config.NEGATIVE_LABEL),
            positive=label_data.get("positive", config.POSITIVE_LABEL),
        )
    except OSError as e:
        raise ConfigurationError(f"cannot read schema file '{path}': {e}") from e
    except (json.JSONDecodeError, KeyError, TypeError) as e:
        raise ConfigurationError(f"malformed schema file '{path}': {e}") from e

    validate_schema(attributes, label)
    return attributes, label


def validate_schema(attributes: Sequence[AttributeSpec], label: LabelSpec) -> None:
    if not attributes:
        raise ConfigurationError("schema defines no attributes")
    ids = [a.id for a in attributes]
    names = [a.name for a in attributes] + [label.name]
    if len(set(ids)) != len(ids):
        raise ConfigurationError("schema attribute ids must be unique")
    if len(set(names)) != len(names):
        raise ConfigurationError("schema attribute names must be unique")
    for a in attributes:
        if a.kind not in (CONTINUOUS, CATEGORICAL):
            raise ConfigurationError(f"attribute '{a.name}' has unknown kind '{a.kind}'")
    if label.negative == label.positive:
        raise ConfigurationError("label values must differ")
