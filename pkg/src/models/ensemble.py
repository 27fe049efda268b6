from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from src.models.tree import DecisionTree

ALGORITHM1 = "algorithm1"
LOGIT = "logit"


@dataclass(frozen=True)
class SampleWeights:
    """The population distribution D_t; `normalizer` is the Z_t that produced it."""

    values: np.ndarray
    normalizer: float = 1.0

    @classmethod
    def uniform(cls, n: int) -> "SampleWeights":
        return cls(values=np.full(n, 1.0 / n))


@dataclass(frozen=True)
class BoostStage:
    tree: DecisionTree
    alpha: float
    eps: Optional[float] = None
    normalizer: Optional[float] = None


@dataclass(frozen=True)
class BoostedEnsemble:
    mode: str
    stages: Tuple[BoostStage, ...]
    initial_score: float
    n_estimators: int
    max_depth: int
    learning_rate: float
    n_features: int
    train_loss: Tuple[float, ...] = field(default_factory=tuple)
    train_error: Tuple[float, ...] = field(default_factory=tuple)
    # Cumulative wall-clock fit time after each stage; not persisted
    stage_seconds: Tuple[float, ...] = field(default_factory=tuple, compare=False)

    @property
    def alphas(self) -> List[float]:
        return [stage.alpha for stage in self.stages]
