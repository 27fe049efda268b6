from typing import List, Sequence, Tuple

import numpy as np
from scipy.stats import rankdata

import src.config as config
from src.models.reports import (
    ClassificationReport,
    ClassMetrics,
    ConfusionMatrix,
    EvalReport,
    RocCurve,
)


def _binary(values: Sequence, what: str) -> np.ndarray:
    array = np.asarray(values)
    if not np.all(np.isin(array, (0, 1))):
        raise ValueError(f"{what} must be 0 or 1")
    return array.astype(np.int8)


def confusion(y_true: Sequence[int], y_pred: Sequence[int]) -> ConfusionMatrix:
    """2x2 counts with >50K (1) as the positive class."""
    if len(y_true) != len(y_pred):
        raise ValueError(f"{len(y_true)} labels but {len(y_pred)} predictions")
    truth = _binary(y_true, "y_true") == 1
    pred = _binary(y_pred, "y_pred") == 1
    return ConfusionMatrix(
        tp=int(np.sum(truth & pred)),
        fp=int(np.sum(~truth & pred)),
        fn=int(np.sum(truth & ~pred)),
        tn=int(np.sum(~truth & ~pred)),
    )


def _ratio(numerator: float, denominator: float, flag: str, flags: List[str]) -> float:
    if denominator == 0:
        flags.append(flag)
        return 0.0
    return numerator / denominator


def _class_metrics(
    hits: int, predicted: int, actual: int, name: str, flags: List[str]
) -> ClassMetrics:
    precision = _ratio(hits, predicted, f"{name}.precision", flags)
    recall = _ratio(hits, actual, f"{name}.recall", flags)
    f1 = _ratio(2 * precision * recall, precision + recall, f"{name}.f1", flags)
    return ClassMetrics(precision=precision, recall=recall, f1=f1, support=actual)


def report(cm: ConfusionMatrix) -> ClassificationReport:
    """
    Accuracy plus precision, recall and F1 for each class and their
    support-weighted averages. Zero denominators give 0 and a flag.
    """
    flags: List[str] = []
    positive = _class_metrics(cm.tp, cm.tp + cm.fp, cm.tp + cm.fn, config.POSITIVE_LABEL, flags)
    negative = _class_metrics(cm.tn, cm.tn + cm.fn, cm.tn + cm.fp, config.NEGATIVE_LABEL, flags)
    accuracy = _ratio(cm.tp + cm.tn, cm.total, "accuracy", flags)

    total = positive.support + negative.support

    def weighted(attr: str) -> float:
        if total == 0:
            return 0.0
        return (
            getattr(positive, attr) * positive.support
            + getattr(negative, attr) * negative.support
        ) / total

    return ClassificationReport(
        accuracy=accuracy,
        per_class={config.POSITIVE_LABEL: positive, config.NEGATIVE_LABEL: negative},
        weighted=ClassMetrics(
            precision=weighted("precision"),
            recall=weighted("recall"),
            f1=weighted("f1"),
            support=total,
        ),
        degenerate=tuple(flags),
    )


def pair_auc(y_true: Sequence[int], scores: Sequence[float]) -> float:
    """Mann-Whitney statistic: P(positive outscores negative), ties counting 1/2."""
    truth = _binary(y_true, "y_true") == 1
    n_pos = int(truth.sum())
    n_neg = len(truth) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs at least one positive and one negative")
    ranks = rankdata(np.asarray(scores, dtype=np.float64))
    u = ranks[truth].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def trapezoid_auc(fpr: np.ndarray, tpr: np.ndarray) -> float:
    return float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))


def roc(y_true: Sequence[int], scores: Sequence[float]) -> RocCurve:
    """
    ROC points from decision scores, one per distinct score (descending), starting
    at (0, 0) and ending at (1, 1). AUC by the trapezoidal rule, cross-checked by
    the pair statistic.
    """
    truth = _binary(y_true, "y_true")
    values = np.asarray(scores, dtype=np.float64)
    if len(truth) != len(values):
        raise ValueError(f"{len(truth)} labels but {len(values)} scores")
    n_pos = int(truth.sum())
    n_neg = len(truth) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("ROC needs at least one positive and one negative")

    order = np.argsort(-values, kind="mergesort")
    sorted_scores = values[order]
    sorted_truth = truth[order]
    # last position of each run of equal scores
    ends = np.r_[np.flatnonzero(np.diff(sorted_scores) != 0), len(values) - 1]
    tps = np.cumsum(sorted_truth)[ends]
    fps = ends + 1 - tps

    fpr = np.r_[0.0, fps / n_neg]
    tpr = np.r_[0.0, tps / n_pos]
    thresholds = np.r_[np.inf, sorted_scores[ends]]
    return RocCurve(
        fpr=fpr,
        tpr=tpr,
        thresholds=thresholds,
        auc=trapezoid_auc(fpr, tpr),
        auc_pairs=pair_auc(truth, values),
    )


def evaluate(split: str, y_true: Sequence[int], scores: Sequence[float]) -> EvalReport:
    """Full report for one split; a score above 0 predicts >50K."""
    scores = np.asarray(scores, dtype=np.float64)
    y_pred = (scores > 0).astype(np.int8)
    cm = confusion(y_true, y_pred)
    return EvalReport(split=split, confusion=cm, report=report(cm), roc=roc(y_true, scores))


def fit_diagnosis(train_accuracy: float, validation_accuracy: float) -> Tuple[str, float]:
    """('good fit' | 'overfit' | 'underfit', train - validation gap)."""
    gap = train_accuracy - validation_accuracy
    if gap < -config.GOOD_FIT_SLACK:
        return "underfit", gap
    if gap > config.OVERFIT_GAP:
        return "overfit", gap
    return "good fit", gap
