from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import pandas as pd

import src.config as config

CONTINUOUS = "continuous"
CATEGORICAL = "categorical"


@dataclass(frozen=True)
class AttributeSpec:
    id: str
    name: str
    kind: str

    @property
    def is_continuous(self) -> bool:
        return self.kind == CONTINUOUS


ADULT_SCHEMA: Tuple[AttributeSpec, ...] = tuple(
    AttributeSpec(id=attr_id, name=name, kind=kind)
    for attr_id, name, kind in config.ADULT_ATTRIBUTES
)


@dataclass(frozen=True)
class LabelSpec:
    name: str = config.LABEL_NAME
    negative: str = config.NEGATIVE_LABEL
    positive: str = config.POSITIVE_LABEL


@dataclass(frozen=True)
class RecordSet:
    """
    Parsed census rows.

    `frame` has one column per attribute in `attributes` (float64 for continuous,
    str for categorical with "?" as the missing marker) plus the label column when
    labels were present in the source files.
    """

    frame: pd.DataFrame
    attributes: Tuple[AttributeSpec, ...]
    label: LabelSpec = field(default_factory=LabelSpec)

    def __len__(self) -> int:
        return len(self.frame)

    @property
    def has_labels(self) -> bool:
        return self.label.name in self.frame.columns

    @property
    def attribute_names(self) -> List[str]:
        return [a.name for a in self.attributes]

    @property
    def categorical(self) -> List[AttributeSpec]:
        return [a for a in self.attributes if not a.is_continuous]

    @property
    def continuous(self) -> List[AttributeSpec]:
        return [a for a in self.attributes if a.is_continuous]

    def by_id(self) -> Dict[str, AttributeSpec]:
        return {a.id: a for a in self.attributes}


@dataclass
class SchemaReport:
    row_count: int
    distinct_counts: Dict[str, int]
    missing_counts: Dict[str, int]
    label_counts: Dict[str, int]

    def to_dict(self) -> dict:
        return {
            "schema_version": config.SCHEMA_VERSION,
            "row_count": self.row_count,
            "distinct_counts": dict(self.distinct_counts),
            "missing_counts": dict(self.missing_counts),
            "label_counts": dict(self.label_counts),
        }
