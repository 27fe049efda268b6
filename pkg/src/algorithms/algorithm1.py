import math
from typing import List

import numpy as np

import src.config as config
from src.algorithms.booster import Booster, BoostParams
from src.algorithms.tree_builder import GINI, TreeParams, fit_tree, predict_tree, presort
from src.models.ensemble import ALGORITHM1, BoostedEnsemble, BoostStage, SampleWeights
from src.models.matrix import Dataset
from src.utils.errors import DomainError, TrainingError


def compute_alpha(eps: float) -> float:
    """Stage weight 1/2 * ln((1 - eps) / eps) for a weighted error in (0, 1)."""
    if not 0.0 < eps < 1.0:
        raise DomainError(f"weighted error must be in (0, 1), got {eps}")
    return 0.5 * (math.log(1.0 - eps) - math.log(eps))


def _check_signs(values: np.ndarray, what: str) -> None:
    if not np.all((values == 1.0) | (values == -1.0)):
        raise DomainError(f"{what} must be -1 or +1")


def update_weights(
    D: SampleWeights, alpha: float, preds: np.ndarray, y: np.ndarray
) -> SampleWeights:
    """
    D_{t+1}(i) = D_t(i) * exp(-alpha * y_i * h(x_i)) / Z_t, with Z_t the sum of the
    numerators.
    """
    preds = np.asarray(preds, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if not (len(D.values) == len(preds) == len(y)):
        raise DomainError("weights, predictions and labels differ in length")
    _check_signs(preds, "predictions")
    _check_signs(y, "labels")

    unnormalized = D.values * np.exp(-alpha * y * preds)
    z = float(unnormalized.sum())
    if not z > 0 or not math.isfinite(z):
        raise DomainError(f"weight normalizer Z_t = {z}")
    return SampleWeights(values=unnormalized / z, normalizer=z)


def weighted_error(D: SampleWeights, preds: np.ndarray, y: np.ndarray) -> float:
    return float(D.values[np.asarray(preds) != np.asarray(y)].sum())


def fit_algorithm1(train: Dataset, params: BoostParams = BoostParams()) -> BoostedEnsemble:
    """
    Exponential-reweighting boosting.

    Each round fits a weighted classification tree on the current distribution D,
    measures its weighted error eps, and stops when eps >= 0.5 (the stage is
    discarded) or eps == 0 (the stage is kept with eps floored to EPS_FLOOR).
    Otherwise the stage gets alpha = 1/2 ln((1 - eps) / eps) and D is reweighted.
    The learning rate is recorded but never scales alpha.

    Args:
        train: Training rows; labels are used in their {-1, +1} view
        params: Stage budget, tree depth and minimum split size

    Returns:
        BoostedEnsemble in algorithm1 mode; train_loss holds the running product
        of the Z_t normalizers
    """
    params.check()
    if not np.all(np.isin(train.labels.values, (0, 1))):
        raise TrainingError("labels must be binary")

    X = train.matrix.values
    y = train.labels.signed
    n = len(y)
    if n == 0:
        raise TrainingError("cannot boost on an empty training set")

    order = presort(X)
    tree_params = TreeParams(
        max_depth=params.max_depth,
        min_samples_split=params.min_samples_split,
        criterion=GINI,
    )
    D = SampleWeights.uniform(n)
    score = np.zeros(n)
    bound = 1.0
    stages: List[BoostStage] = []
    losses: List[float] = []
    errors: List[float] = []

    for _ in range(params.n_estimators):
        tree = fit_tree(X, y, D.values, tree_params, presorted=order)
        h = predict_tree(tree, X)
        eps = weighted_error(D, h, y)
        if eps >= 0.5:
            break

        alpha = compute_alpha(max(eps, config.EPS_FLOOR))
        D = update_weights(D, alpha, h, y)
        stages.append(BoostStage(tree=tree, alpha=alpha, eps=eps, normalizer=D.normalizer))

        score += alpha * h
        bound *= D.normalizer
        losses.append(bound)
        errors.append(float(np.mean(np.where(score > 0, 1.0, -1.0) != y)))
        if eps == 0.0:
            break

    return BoostedEnsemble(
        mode=ALGORITHM1,
        stages=tuple(stages),
        initial_score=0.0,
        n_estimators=params.n_estimators,
        max_depth=params.max_depth,
        learning_rate=params.learning_rate,
        n_features=X.shape[1],
        train_loss=tuple(losses),
        train_error=tuple(errors),
    )


class Algorithm1Booster(Booster):
    """Exponential-reweighting booster with computed stage weights."""

    name = ALGORITHM1

    def fit(self, train: Dataset) -> BoostedEnsemble:
        return fit_algorithm1(train, self.params)
