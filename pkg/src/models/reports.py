from dataclasses import dataclass, field
from itertools import product
from typing import Dict, List, Optional, Tuple

import numpy as np

import src.config as config


@dataclass(frozen=True)
class FiveNumberSummary:
    min: float
    q1: float
    median: float
    q3: float
    max: float
    whisker_low: float
    whisker_high: float
    outlier_count: int
    count: int
    # distinct values beyond the whiskers, ascending
    outlier_values: Tuple[float, ...] = ()

    def to_dict(self) -> dict:
        return {
            "min": self.min,
            "q1": self.q1,
            "median": self.median,
            "q3": self.q3,
            "max": self.max,
            "whisker_low": self.whisker_low,
            "whisker_high": self.whisker_high,
            "outlier_count": self.outlier_count,
            "count": self.count,
            "outlier_values": list(self.outlier_values),
        }


@dataclass(frozen=True)
class CorrelationMatrix:
    names: Tuple[str, ...]
    values: np.ndarray

    def to_dict(self) -> dict:
        return {
            "schema_version": config.SCHEMA_VERSION,
            "names": list(self.names),
            "values": [[float(v) for v in row] for row in self.values],
        }

    def label_column(self) -> Dict[str, float]:
        """Feature-to-label correlations (the label is the last column)."""
        return {
            name: float(self.values[i, -1]) for i, name in enumerate(self.names[:-1])
        }


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def as_array(self) -> np.ndarray:
        """Rows are the actual class (>50K first), columns the predicted class."""
        return np.array([[self.tp, self.fn], [self.fp, self.tn]], dtype=np.int64)

    def normalized(self) -> np.ndarray:
        counts = self.as_array().astype(np.float64)
        sums = counts.sum(axis=1, keepdims=True)
        return np.divide(counts, sums, out=np.zeros_like(counts), where=sums > 0)

    def to_dict(self) -> dict:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "tn": self.tn,
            "normalized": [[float(v) for v in row] for row in self.normalized()],
        }


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "support": self.support,
        }


@dataclass(frozen=True)
class ClassificationReport:
    accuracy: float
    per_class: Dict[str, ClassMetrics]
    weighted: ClassMetrics
    degenerate: Tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "per_class": {name: m.to_dict() for name, m in self.per_class.items()},
            "weighted": self.weighted.to_dict(),
            "degenerate": list(self.degenerate),
        }


@dataclass(frozen=True)
class RocCurve:
    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray
    auc: float
    auc_pairs: float

    def to_dict(self) -> dict:
        return {
            "auc": self.auc,
            "auc_pairs": self.auc_pairs,
            "points": [
                {
                    "fpr": float(f),
                    "tpr": float(t),
                    # The first point sits above every score.
                    "threshold": None if np.isinf(th) else float(th),
                }
                for f, t, th in zip(self.fpr, self.tpr, self.thresholds)
            ],
        }


@dataclass(frozen=True)
class EvalReport:
    split: str
    confusion: ConfusionMatrix
    report: ClassificationReport
    roc: RocCurve

    def to_dict(self) -> dict:
        return {
            "schema_version": config.SCHEMA_VERSION,
            "split": self.split,
            "samples": self.confusion.total,
            "confusion_matrix": self.confusion.to_dict(),
            "classification": self.report.to_dict(),
            "roc": self.roc.to_dict(),
        }


@dataclass(frozen=True)
class ParamGrid:
    n_estimators: Tuple[int, ...]
    max_depth: Tuple[int, ...]
    learning_rate: Tuple[float, ...]

    def cells(self) -> List[Tuple[int, int, float]]:
        return list(product(self.n_estimators, self.max_depth, self.learning_rate))

    def to_dict(self) -> dict:
        return {
            "n_estimators": list(self.n_estimators),
            "max_depth": list(self.max_depth),
            "learning_rate": list(self.learning_rate),
        }


@dataclass
class CellResult:
    n_estimators: int
    max_depth: int
    learning_rate: float
    fold_scores: List[float] = field(default_factory=list)
    fit_seconds: float = 0.0
    failed: bool = False
    failure: Optional[str] = None

    @property
    def mean_score(self) -> float:
        if self.failed or not self.fold_scores:
            return float("nan")
        return float(np.mean(self.fold_scores))

    @property
    def params(self) -> Tuple[int, int, float]:
        return (self.n_estimators, self.max_depth, self.learning_rate)

    def to_dict(self) -> dict:
        return {
            "n_estimators": self.n_estimators,
            "max_depth": self.max_depth,
            "learning_rate": self.learning_rate,
            "mean_score": None if self.failed else self.mean_score,
            "fold_scores": list(self.fold_scores),
            "failed": self.failed,
            "failure": self.failure,
        }


@dataclass
class TuneReport:
    cells: List[CellResult]
    best: Optional[CellResult]
    seed: int
    folds: int
    grid: ParamGrid

    def to_dict(self) -> dict:
        return {
            "schema_version": config.SCHEMA_VERSION,
            "seed": self.seed,
            "folds": self.folds,
            "grid": self.grid.to_dict(),
            "best": None if self.best is None else self.best.to_dict(),
            "cells": [cell.to_dict() for cell in self.cells],
        }


@dataclass
class RunManifest:
    command: str
    config: dict
    seeds: Dict[str, int]
    inputs: Dict[str, str]
    outputs: List[str] = field(default_factory=list)
    started_at: str = ""
    wall_clock_seconds: float = 0.0
    exit_code: int = 0

    def to_dict(self) -> dict:
        return {
            "schema_version": config.SCHEMA_VERSION,
            "package_version": config.PACKAGE_VERSION,
            "command": self.command,
            "config": self.config,
            "seeds": dict(self.seeds),
            "inputs": dict(self.inputs),
            "outputs": sorted(self.outputs),
            "started_at": self.started_at,
            "wall_clock_seconds": self.wall_clock_seconds,
            "exit_code": self.exit_code,
        }
