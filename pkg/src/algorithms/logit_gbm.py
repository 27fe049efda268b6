import math
import time
from typing import List

import numpy as np

import src.config as config
from src.algorithms.booster import Booster, BoostParams
from src.algorithms.tree_builder import (
    SQUARED_ERROR,
    TreeParams,
    apply_tree,
    fit_tree,
    presort,
)
from src.models.ensemble import LOGIT, BoostedEnsemble, BoostStage
from src.models.matrix import Dataset
from src.utils.errors import TrainingError

# Leaves whose hessian sum falls below this get a zero step.
MIN_HESSIAN = 1e-150


def sigmoid(F: np.ndarray) -> np.ndarray:
    """Logistic function; beyond +/-SIGMOID_CLIP the asymptotic forms avoid exp overflow."""
    F = np.asarray(F, dtype=np.float64)
    out = np.empty_like(F)
    high = F > config.SIGMOID_CLIP
    low = F < -config.SIGMOID_CLIP
    mid = ~(high | low)
    out[mid] = 1.0 / (1.0 + np.exp(-F[mid]))
    out[high] = 1.0 - np.exp(-F[high])
    out[low] = np.exp(F[low])
    return out


def log_loss(y: np.ndarray, F: np.ndarray) -> float:
    """Mean binomial deviance / 2: log(1 + e^F) - y F."""
    return float(np.mean(np.logaddexp(0.0, F) - y * F))


def initial_score(y: np.ndarray) -> float:
    """Log-odds of the base rate."""
    rate = float(np.mean(y))
    if rate <= 0.0 or rate >= 1.0:
        raise TrainingError("training labels hold a single class; F0 is undefined")
    return math.log(rate / (1.0 - rate))


def newton_leaf_values(
    leaves: np.ndarray, residuals: np.ndarray, p: np.ndarray, n_nodes: int
) -> np.ndarray:
    """sum(r) / sum(p (1 - p)) per leaf."""
    numerator = np.bincount(leaves, weights=residuals, minlength=n_nodes)
    denominator = np.bincount(leaves, weights=p * (1.0 - p), minlength=n_nodes)
    steps = np.zeros(n_nodes)
    ok = np.abs(denominator) >= MIN_HESSIAN
    steps[ok] = numerator[ok] / denominator[ok]
    return steps


def fit_logit_gbm(train: Dataset, params: BoostParams = BoostParams()) -> BoostedEnsemble:
    """
    Stagewise additive log-loss boosting.

    Starts from F0 = log-odds of the base rate. Each stage fits a regression tree
    to the pseudo-residuals y - sigmoid(F), replaces every leaf value with the
    Newton step sum(r) / sum(p (1 - p)) over the leaf's rows, and adds
    learning_rate times the tree to F.

    Args:
        train: Training rows; labels are used in their {0, 1} view
        params: Stage count, tree depth, learning rate, minimum split size

    Returns:
        BoostedEnsemble in logit mode; train_loss holds the mean log-loss after
        every stage and stage_seconds the measured fit time up to it
    """
    params.check()
    start = time.perf_counter()
    X = train.matrix.values
    y = train.labels.binary
    if len(y) == 0:
        raise TrainingError("cannot boost on an empty training set")
    if not np.all(np.isin(y, (0.0, 1.0))):
        raise TrainingError("labels must be binary")

    f0 = initial_score(y)
    F = np.full(len(y), f0)
    order = presort(X)
    tree_params = TreeParams(
        max_depth=params.max_depth,
        min_samples_split=params.min_samples_split,
        criterion=SQUARED_ERROR,
    )
    stages: List[BoostStage] = []
    losses: List[float] = []
    errors: List[float] = []
    seconds: List[float] = []

    for _ in range(params.n_estimators):
        p = sigmoid(F)
        residuals = y - p
        tree = fit_tree(X, residuals, None, tree_params, presorted=order)
        leaves = apply_tree(tree, X)
        steps = newton_leaf_values(leaves, residuals, p, tree.node_count)
        values = np.where(tree.is_leaf, steps, tree.value)
        tree = tree.with_values(values)

        F = F + params.learning_rate * values[leaves]
        stages.append(BoostStage(tree=tree, alpha=params.learning_rate))
        losses.append(log_loss(y, F))
        errors.append(float(np.mean((F > 0) != (y == 1.0))))
        seconds.append(time.perf_counter() - start)

    return BoostedEnsemble(
        mode=LOGIT,
        stages=tuple(stages),
        initial_score=f0,
        n_estimators=params.n_estimators,
        max_depth=params.max_depth,
        learning_rate=params.learning_rate,
        n_features=X.shape[1],
        train_loss=tuple(losses),
        train_error=tuple(errors),
        stage_seconds=tuple(seconds),
    )


class LogitBooster(Booster):
    """Log-loss gradient booster with Newton leaf steps."""

    name = LOGIT

    def fit(self, train: Dataset) -> BoostedEnsemble:
        return fit_logit_gbm(train, self.params)
