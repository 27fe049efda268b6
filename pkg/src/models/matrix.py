from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

import src.config as config


@dataclass(frozen=True)
class EncodingMap:
    """Per categorical attribute, categories in byte order; code = position."""

    categories: Dict[str, Tuple[str, ...]]

    def code(self, attribute: str, value: str) -> int:
        return self.categories[attribute].index(value)

    def decode(self, attribute: str, code: int) -> str:
        return self.categories[attribute][code]

    def to_dict(self) -> dict:
        return {
            "schema_version": config.SCHEMA_VERSION,
            "categories": {name: list(cats) for name, cats in self.categories.items()},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EncodingMap":
        return cls(
            categories={
                name: tuple(cats) for name, cats in data["categories"].items()
            }
        )


@dataclass(frozen=True)
class ColumnSpec:
    """
    One column of a FeatureMatrix.

    encoding is "raw" (continuous pass-through), "label" (integer category code)
    or "onehot" (indicator for `category`).
    """

    source: str
    encoding: str
    category: Optional[str] = None

    @property
    def label(self) -> str:
        if self.encoding == "onehot":
            return f"{self.source}={self.category}"
        return self.source


@dataclass(frozen=True)
class FeatureMatrix:
    values: np.ndarray
    columns: Tuple[ColumnSpec, ...]

    def __post_init__(self):
        if self.values.ndim != 2 or self.values.shape[1] != len(self.columns):
            raise ValueError(
                f"matrix shape {self.values.shape} does not match {len(self.columns)} columns"
            )

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_columns(self) -> int:
        return self.values.shape[1]

    @property
    def column_names(self) -> List[str]:
        return [c.label for c in self.columns]

    def take(self, rows: np.ndarray) -> "FeatureMatrix":
        return FeatureMatrix(values=self.values[rows], columns=self.columns)


@dataclass(frozen=True)
class LabelVector:
    """Binary labels stored as {0,1}; >50K is 1 (and +1 in the signed view)."""

    values: np.ndarray

    def __len__(self) -> int:
        return len(self.values)

    @property
    def binary(self) -> np.ndarray:
        return self.values.astype(np.float64)

    @property
    def signed(self) -> np.ndarray:
        return np.where(self.values == 1, 1.0, -1.0)

    def take(self, rows: np.ndarray) -> "LabelVector":
        return LabelVector(values=self.values[rows])


@dataclass(frozen=True)
class SplitIndex:
    seed: int
    permutation: np.ndarray
    boundary: int
    requested_seed: int
    attempts: int

    @property
    def train_rows(self) -> np.ndarray:
        return self.permutation[: self.boundary]

    @property
    def test_rows(self) -> np.ndarray:
        return self.permutation[self.boundary :]

    def to_dict(self) -> dict:
        return {
            "schema_version": config.SCHEMA_VERSION,
            "seed": self.seed,
            "requested_seed": self.requested_seed,
            "attempts": self.attempts,
            "boundary": self.boundary,
            "permutation": [int(i) for i in self.permutation],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SplitIndex":
        return cls(
            seed=int(data["seed"]),
            permutation=np.asarray(data["permutation"], dtype=np.int64),
            boundary=int(data["boundary"]),
            requested_seed=int(data["requested_seed"]),
            attempts=int(data["attempts"]),
        )


@dataclass(frozen=True)
class Dataset:
    """A FeatureMatrix with its aligned labels (a train or test set)."""

    matrix: FeatureMatrix
    labels: LabelVector

    def __len__(self) -> int:
        return self.matrix.n_rows

    def take(self, rows: np.ndarray) -> "Dataset":
        return Dataset(matrix=self.matrix.take(rows), labels=self.labels.take(rows))
