from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Iterator, Union

import numpy as np

import src.config as config
from src.algorithms.tree_builder import ArrayLike, as_array, predict_tree
from src.models.ensemble import BoostedEnsemble
from src.models.matrix import Dataset
from src.utils.errors import ConfigurationError, TrainingError


@dataclass(frozen=True)
class BoostParams:
    n_estimators: int = config.N_ESTIMATORS
    max_depth: int = config.MAX_DEPTH
    learning_rate: float = config.LEARNING_RATE
    min_samples_split: int = config.MIN_SAMPLES_SPLIT

    def check(self) -> "BoostParams":
        if self.n_estimators < 1:
            raise ConfigurationError("at least one boosting stage is required")
        if self.max_depth < 1:
            raise ConfigurationError("max_depth must be at least 1")
        if not 0.0 <= self.learning_rate <= 1.0:
            raise ConfigurationError(
                f"learning rate must be in [0, 1], got {self.learning_rate}"
            )
        return self


class Booster(ABC):
    """Base class for the boosting modes."""

    name = "booster"

    def __init__(self, params: BoostParams = BoostParams()):
        self.params = params

    @abstractmethod
    def fit(self, train: Dataset) -> BoostedEnsemble:
        """
        Fit a boosted ensemble on a training set.

        Args:
            train: Encoded training rows and their labels

        Returns:
            The fitted BoostedEnsemble
        """


def get_booster(mode: str, params: BoostParams = BoostParams()) -> Booster:
    """Booster for a mode name ('logit' or 'algorithm1')."""
    from src.algorithms.algorithm1 import Algorithm1Booster
    from src.algorithms.logit_gbm import LogitBooster

    boosters = {
        LogitBooster.name: LogitBooster,
        Algorithm1Booster.name: Algorithm1Booster,
    }
    if mode not in boosters:
        raise ConfigurationError(
            f"unknown mode '{mode}', expected one of {', '.join(sorted(boosters))}"
        )
    return boosters[mode](params)


def _check_arity(e: BoostedEnsemble, X: np.ndarray) -> None:
    if X.shape[-1] != e.n_features:
        raise TrainingError(
            f"ensemble expects {e.n_features} columns, got {X.shape[-1]}"
        )


def staged_decision_function(e: BoostedEnsemble, X: ArrayLike) -> Iterator[np.ndarray]:
    """Scores of every row after each stage, stage 1 first."""
    X = as_array(X)
    _check_arity(e, X)
    score = np.full(X.shape[0], e.initial_score)
    for stage in e.stages:
        score = score + stage.alpha * predict_tree(stage.tree, X)
        yield score


def decision_function(e: BoostedEnsemble, x: ArrayLike) -> Union[float, np.ndarray]:
    """
    Raw ensemble score: F0 + sum of alpha_t * h_t(x). In logit mode alpha_t is the
    learning rate and the score is a log-odds; in algorithm1 mode F0 = 0 and
    alpha_t is the stage weight. Positive means >50K.
    """
    values = as_array(x)
    single = values.ndim == 1
    X = values[np.newaxis, :] if single else values
    _check_arity(e, X)
    score = np.full(X.shape[0], e.initial_score)
    for stage in e.stages:
        score += stage.alpha * predict_tree(stage.tree, X)
    return float(score[0]) if single else score


def predict_classes(e: BoostedEnsemble, X: ArrayLike) -> np.ndarray:
    """1 (>50K) where the score is strictly positive, else 0."""
    values = as_array(X)
    if values.ndim == 1:
        values = values[np.newaxis, :]
    scores = decision_function(e, values)
    return (scores > 0).astype(np.int8)


def predict(e: BoostedEnsemble, x: ArrayLike) -> str:
    """Label of one row; a score of exactly 0 is <=50K."""
    score = decision_function(e, x)
    return config.POSITIVE_LABEL if score > 0 else config.NEGATIVE_LABEL
