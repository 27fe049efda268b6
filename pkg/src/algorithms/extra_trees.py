from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from joblib import Parallel, delayed

import src.config as config
from src.algorithms.tree_builder import GINI, NodeList, as_array, tree_importances
from src.models.matrix import FeatureMatrix
from src.models.tree import DecisionTree, ExtraTreesModel, ImportanceVector
from src.utils.errors import ConfigurationError, TrainingError
from src.utils.random_utils import make_rng


@dataclass(frozen=True)
class ExtraTreesParams:
    n_trees: int = config.EXTRA_TREES_N_TREES
    k_features: Optional[int] = None  # ceil(sqrt(p)) when None
    min_samples_split: int = config.EXTRA_TREES_MIN_SAMPLES_SPLIT
    max_depth: Optional[int] = None


def _gini(n1: np.ndarray, n: np.ndarray) -> np.ndarray:
    p = n1 / n
    return 2.0 * p * (1.0 - p)


def _fit_random_tree(
    X: np.ndarray,
    y: np.ndarray,
    k_features: int,
    min_samples_split: int,
    max_depth: Optional[int],
    rng: np.random.Generator,
) -> DecisionTree:
    """
    One extremely randomized tree on the full sample.

    At every node k columns are drawn without replacement among those that are not
    constant within the node, each gets one threshold drawn uniformly in
    [min, max) of the node, and the candidate with the largest gini decrease wins.
    """
    n_features = X.shape[1]
    nodes = NodeList()
    stack: List[Tuple[np.ndarray, int, Optional[int], int]] = [
        (np.arange(X.shape[0]), 0, None, 0)
    ]

    while stack:
        rows, depth, parent, side = stack.pop()
        t = y[rows]
        m = len(rows)
        p1 = float(t.mean())
        node = nodes.add(
            value=1.0 if p1 > 0.5 else 0.0,
            impurity=2.0 * p1 * (1.0 - p1),
            weight=float(m),
            samples=m,
        )
        nodes.attach(parent, side, node)

        if (
            (max_depth is not None and depth >= max_depth)
            or m < min_samples_split
            or p1 == 0.0
            or p1 == 1.0
        ):
            continue

        Xn = X[rows]
        lo = Xn.min(axis=0)
        hi = Xn.max(axis=0)
        candidates = np.flatnonzero(hi > lo)
        if len(candidates) == 0:
            continue

        k = min(k_features, len(candidates))
        cols = np.sort(rng.choice(candidates, size=k, replace=False))
        thresholds = rng.uniform(lo[cols], hi[cols])
        # uniform() may round up to hi; keep the right side non-empty
        thresholds = np.minimum(thresholds, np.nextafter(hi[cols], lo[cols]))

        goes_left = Xn[:, cols] <= thresholds
        n_left = goes_left.sum(axis=0).astype(np.float64)
        n_right = m - n_left
        pos_left = (goes_left * t[:, np.newaxis]).sum(axis=0)
        pos_right = t.sum() - pos_left
        child = n_left * _gini(pos_left, n_left) + n_right * _gini(pos_right, n_right)

        best = int(np.argmin(child))
        nodes.split(node, int(cols[best]), float(thresholds[best]))
        mask = goes_left[:, best]
        stack.append((rows[~mask], depth + 1, node, 1))
        stack.append((rows[mask], depth + 1, node, 0))

    return nodes.to_tree(max_depth, n_features, GINI)


def fit_extra_trees(
    X: Union[np.ndarray, FeatureMatrix],
    y: np.ndarray,
    params: ExtraTreesParams = ExtraTreesParams(),
    seed: int = config.SEED,
    n_jobs: int = config.N_JOBS,
) -> ExtraTreesModel:
    """
    Fit an Extremely Randomized Trees ensemble for feature scoring.

    Tree i draws from its own PCG64 stream keyed by (seed, i), so the model does
    not depend on n_jobs.

    Args:
        X: Label-encoded matrix (one column per attribute)
        y: Binary labels in {0, 1}
        params: Ensemble size, features per split, minimum split size
        seed: Base seed
        n_jobs: joblib workers (threads)

    Returns:
        The fitted ExtraTreesModel
    """
    names: Tuple[str, ...] = ()
    if isinstance(X, FeatureMatrix):
        names = tuple(X.column_names)
    X = as_array(X)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0 or X.shape[1] == 0:
        raise TrainingError("cannot fit Extra Trees on an empty matrix")
    if len(y) != X.shape[0]:
        raise TrainingError(f"X has {X.shape[0]} rows but y has {len(y)}")
    if not np.all(np.isin(y, (0.0, 1.0))):
        raise TrainingError("Extra Trees labels must be 0 or 1")
    if params.n_trees < 1:
        raise ConfigurationError("n_trees must be at least 1")

    n_features = X.shape[1]
    k_features = (
        config.default_k_features(n_features)
        if params.k_features is None
        else params.k_features
    )
    if k_features > n_features:
        raise ConfigurationError(
            f"k_features={k_features} exceeds the {n_features} available columns"
        )
    if k_features < 1:
        raise ConfigurationError("k_features must be at least 1")

    trees = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(_fit_random_tree)(
            X,
            y,
            k_features,
            params.min_samples_split,
            params.max_depth,
            make_rng(seed, i),
        )
        for i in range(params.n_trees)
    )

    return ExtraTreesModel(
        trees=list(trees),
        n_trees=params.n_trees,
        k_features=k_features,
        min_samples_split=params.min_samples_split,
        seed=seed,
        feature_names=names or tuple(f"x{j}" for j in range(n_features)),
    )


def feature_importances(
    m: Union[ExtraTreesModel, DecisionTree],
    feature_names: Optional[Sequence[str]] = None,
) -> ImportanceVector:
    """
    Mean decrease in impurity averaged over trees and normalized to sum 1.

    An ensemble without any split scores every column equally.
    """
    trees = [m] if isinstance(m, DecisionTree) else m.trees
    n_features = trees[0].n_features
    if feature_names is None:
        feature_names = (
            m.feature_names
            if isinstance(m, ExtraTreesModel)
            else tuple(f"x{j}" for j in range(n_features))
        )

    scores = np.mean([tree_importances(tree) for tree in trees], axis=0)
    scores = np.maximum(scores, 0.0)
    total = scores.sum()
    if total > 0:
        scores = scores / total
    else:
        scores = np.full(n_features, 1.0 / n_features)
    return ImportanceVector(feature_names=tuple(feature_names), scores=scores)
