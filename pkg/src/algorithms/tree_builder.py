from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import numpy as np

import src.config as config
from src.models.matrix import FeatureMatrix
from src.models.tree import LEAF, DecisionTree
from src.utils.errors import TrainingError

GINI = "gini"
SQUARED_ERROR = "squared_error"
CRITERIA = (GINI, SQUARED_ERROR)

# Relative tolerance under which two split scores count as tied.
TIE_TOLERANCE = 1e-12

ArrayLike = Union[np.ndarray, FeatureMatrix]


@dataclass(frozen=True)
class TreeParams:
    max_depth: Optional[int] = config.MAX_DEPTH
    min_samples_split: int = config.MIN_SAMPLES_SPLIT
    criterion: str = SQUARED_ERROR


def as_array(X: ArrayLike) -> np.ndarray:
    values = X.values if isinstance(X, FeatureMatrix) else X
    return np.asarray(values, dtype=np.float64)


def presort(X: ArrayLike) -> np.ndarray:
    """Per-column stable argsort, shape (n_columns, n_rows); reusable across fits on X."""
    return np.argsort(as_array(X).T, axis=1, kind="stable")


class NodeList:
    """Growable node arrays; converted to a DecisionTree once growth ends."""

    def __init__(self):
        self.feature: List[int] = []
        self.threshold: List[float] = []
        self.left: List[int] = []
        self.right: List[int] = []
        self.value: List[float] = []
        self.impurity: List[float] = []
        self.weighted_samples: List[float] = []
        self.samples: List[int] = []

    def add(self, value: float, impurity: float, weight: float, samples: int) -> int:
        self.feature.append(LEAF)
        self.threshold.append(0.0)
        self.left.append(LEAF)
        self.right.append(LEAF)
        self.value.append(value)
        self.impurity.append(impurity)
        self.weighted_samples.append(weight)
        self.samples.append(samples)
        return len(self.feature) - 1

    def attach(self, parent: Optional[int], side: int, child: int) -> None:
        if parent is None:
            return
        if side == 0:
            self.left[parent] = child
        else:
            self.right[parent] = child

    def split(self, node: int, feature: int, threshold: float) -> None:
        self.feature[node] = feature
        self.threshold[node] = threshold

    def to_tree(self, max_depth: Optional[int], n_features: int, criterion: str) -> DecisionTree:
        return DecisionTree(
            feature=np.asarray(self.feature, dtype=np.int64),
            threshold=np.asarray(self.threshold, dtype=np.float64),
            left=np.asarray(self.left, dtype=np.int64),
            right=np.asarray(self.right, dtype=np.int64),
            value=np.asarray(self.value, dtype=np.float64),
            impurity=np.asarray(self.impurity, dtype=np.float64),
            weighted_samples=np.asarray(self.weighted_samples, dtype=np.float64),
            samples=np.asarray(self.samples, dtype=np.int64),
            max_depth=max_depth,
            n_features=n_features,
            criterion=criterion,
        )


def check_training_input(
    X: np.ndarray, y: np.ndarray, w: np.ndarray
) -> None:
    if X.ndim != 2:
        raise TrainingError(f"X must be 2-dimensional, got shape {X.shape}")
    if X.shape[0] == 0 or X.shape[1] == 0:
        raise TrainingError("cannot fit a tree on an empty matrix")
    if len(y) != X.shape[0] or len(w) != X.shape[0]:
        raise TrainingError(
            f"X has {X.shape[0]} rows but y has {len(y)} and w has {len(w)}"
        )
    if not np.all(np.isfinite(X)):
        raise TrainingError("X contains non-finite values")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise TrainingError("sample weights must be finite and non-negative")
    if w.sum() <= 0:
        raise TrainingError("sample weights sum to zero")


class _CartBuilder:
    """Greedy depth-first CART growth over presorted index matrices."""

    def __init__(self, X: np.ndarray, y: np.ndarray, w: np.ndarray, params: TreeParams):
        self.XT = np.ascontiguousarray(X.T)
        self.n_rows = X.shape[0]
        self.n_features = X.shape[1]
        self.w = w
        self.params = params

        if params.criterion == GINI:
            self.classes = np.unique(y)
            if len(self.classes) > 2:
                raise TrainingError(
                    f"classification trees are binary, found {len(self.classes)} classes"
                )
            # target is the indicator of the larger class
            self.target = (y == self.classes[-1]).astype(np.float64)
        else:
            self.classes = None
            self.target = y.astype(np.float64)
        self.wt = w * self.target
        self.wt2 = self.wt * self.target
        self.nodes = NodeList()

    def _leaf_stats(self, rows: np.ndarray) -> Tuple[float, float, float]:
        """(value, impurity, weight) of the rows reaching a node."""
        weight = float(self.w[rows].sum())
        if weight > 0:
            t_sum = float(self.wt[rows].sum())
            mean = t_sum / weight
            t2 = float(self.wt2[rows].sum()) / weight
        else:
            mean = float(self.target[rows].mean())
            t2 = float((self.target[rows] ** 2).mean())

        if self.params.criterion == GINI:
            impurity = 2.0 * mean * (1.0 - mean)
            # Weighted majority; an exact tie goes to the smaller class.
            value = float(self.classes[-1] if mean > 0.5 else self.classes[0])
        else:
            impurity = max(t2 - mean * mean, 0.0)
            value = mean
        return value, impurity, weight

    def _is_pure(self, rows: np.ndarray) -> bool:
        t = self.target[rows]
        return bool(np.all(t == t[0]))

    def _best_split(self, S: np.ndarray, weight: float) -> Optional[Tuple[int, int, float]]:
        """(column, position, threshold) of the best split, or None."""
        m = S.shape[1]
        V = np.take_along_axis(self.XT, S, axis=1)
        WL = np.cumsum(self.w[S], axis=1)[:, :-1]
        TL = np.cumsum(self.wt[S], axis=1)[:, :-1]
        WR = weight - WL
        TR = float(self.wt[S[0]].sum()) - TL

        valid = (V[:, :-1] < V[:, 1:]) & (WL > 0) & (WR > 0)
        if not valid.any():
            return None

        with np.errstate(divide="ignore", invalid="ignore"):
            if self.params.criterion == GINI:
                score = (TL * TL + (WL - TL) ** 2) / WL + (TR * TR + (WR - TR) ** 2) / WR
            else:
                score = TL * TL / WL + TR * TR / WR
        score = np.where(valid, score, -np.inf)

        best = score.max()
        tolerance = TIE_TOLERANCE * max(1.0, abs(best))
        # Row-major order: lowest column first, then lowest threshold.
        flat = int(np.flatnonzero(score >= best - tolerance)[0])
        col, pos = divmod(flat, m - 1)

        lo, hi = V[col, pos], V[col, pos + 1]
        threshold = (lo + hi) / 2.0
        if not lo <= threshold < hi:
            threshold = lo
        return col, pos, float(threshold)

    def build(self, S: np.ndarray) -> DecisionTree:
        stack: List[Tuple[np.ndarray, int, Optional[int], int]] = [(S, 0, None, 0)]
        mark = np.zeros(self.n_rows, dtype=bool)
        max_depth = self.params.max_depth

        while stack:
            S, depth, parent, side = stack.pop()
            rows = S[0]
            value, impurity, weight = self._leaf_stats(rows)
            node = self.nodes.add(value, impurity, weight, len(rows))
            self.nodes.attach(parent, side, node)

            if (
                (max_depth is not None and depth >= max_depth)
                or len(rows) < self.params.min_samples_split
                or weight <= 0
                or self._is_pure(rows)
            ):
                continue

            split = self._best_split(S, weight)
            if split is None:
                continue
            col, pos, threshold = split
            self.nodes.split(node, col, threshold)

            mark[S[col, : pos + 1]] = True
            goes_left = mark[S]
            n_left = pos + 1
            left = S[goes_left].reshape(self.n_features, n_left)
            right = S[~goes_left].reshape(self.n_features, len(rows) - n_left)
            mark[S[col, : pos + 1]] = False

            # Right pushed first so the left subtree gets the smaller ids.
            stack.append((right, depth + 1, node, 1))
            stack.append((left, depth + 1, node, 0))

        return self.nodes.to_tree(max_depth, self.n_features, self.params.criterion)


def fit_tree(
    X: ArrayLike,
    y: np.ndarray,
    w: Optional[np.ndarray] = None,
    params: TreeParams = TreeParams(),
    presorted: Optional[np.ndarray] = None,
) -> DecisionTree:
    """
    Grow a CART tree greedily.

    Each node takes the (column, threshold) that minimizes the weighted child
    impurity (gini for classification, squared error for regression). Thresholds
    are midpoints between consecutive distinct values; ties go to the lowest
    column, then the lowest threshold. Growth stops at max_depth, below
    min_samples_split rows, or at a pure node.

    Args:
        X: Design matrix (n_rows, n_columns)
        y: Targets (class values for gini, reals for squared error)
        w: Non-negative sample weights, uniform when omitted
        params: Depth, minimum split size and criterion
        presorted: Output of presort(X), to skip re-sorting between fits

    Returns:
        The fitted DecisionTree
    """
    X = as_array(X)
    y = np.asarray(y, dtype=np.float64)
    w = np.ones(len(y)) if w is None else np.asarray(w, dtype=np.float64)
    if params.criterion not in CRITERIA:
        raise TrainingError(f"unknown criterion '{params.criterion}'")
    check_training_input(X, y, w)

    builder = _CartBuilder(X, y, w, params)
    S = presort(X) if presorted is None else presorted
    if S.shape != (X.shape[1], X.shape[0]):
        raise TrainingError("presorted index does not match X")
    return builder.build(S)


def apply_tree(t: DecisionTree, X: ArrayLike) -> np.ndarray:
    """Leaf id reached by every row of X."""
    X = as_array(X)
    if X.ndim != 2 or X.shape[1] != t.n_features:
        raise TrainingError(
            f"tree expects {t.n_features} columns, got shape {X.shape}"
        )
    node = np.zeros(X.shape[0], dtype=np.int64)
    active = np.flatnonzero(t.feature[node] != LEAF)
    while len(active):
        current = node[active]
        features = t.feature[current]
        goes_left = X[active, features] <= t.threshold[current]
        node[active] = np.where(goes_left, t.left[current], t.right[current])
        active = active[t.feature[node[active]] != LEAF]
    return node


def predict_tree(t: DecisionTree, x: ArrayLike) -> Union[float, np.ndarray]:
    """Route a row (or each row of a matrix) from the root; x[col] <= threshold goes left."""
    values = as_array(x)
    if values.ndim == 1:
        if values.shape[0] != t.n_features:
            raise TrainingError(
                f"tree expects {t.n_features} columns, got {values.shape[0]}"
            )
        return float(t.value[apply_tree(t, values[np.newaxis, :])[0]])
    return t.value[apply_tree(t, values)]


def training_loss(t: DecisionTree) -> float:
    """Sum over leaves of weighted samples times impurity."""
    leaves = t.is_leaf
    return float(np.sum(t.weighted_samples[leaves] * t.impurity[leaves]))


def tree_importances(t: DecisionTree) -> np.ndarray:
    """
    Unnormalized mean decrease in impurity per column:
    sum over splits of (W_node / W_root) * impurity decrease.
    """
    scores = np.zeros(t.n_features)
    root_weight = t.weighted_samples[0]
    if root_weight <= 0:
        return scores
    for node in np.flatnonzero(~t.is_leaf):
        left, right = t.left[node], t.right[node]
        decrease = (
            t.weighted_samples[node] * t.impurity[node]
            - t.weighted_samples[left] * t.impurity[left]
            - t.weighted_samples[right] * t.impurity[right]
        )
        scores[t.feature[node]] += decrease / root_weight
    return scores
