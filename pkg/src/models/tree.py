from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

import src.config as config

LEAF = -1


@dataclass(frozen=True)
class DecisionTree:
    """
    Axis-aligned binary tree stored as parallel node arrays (node 0 is the root).

    Internal nodes route x[feature] <= threshold to `left`, everything else to
    `right`. Leaves have feature == LEAF and children == LEAF.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    impurity: np.ndarray
    weighted_samples: np.ndarray
    samples: np.ndarray
    max_depth: Optional[int]
    n_features: int
    criterion: str

    @property
    def node_count(self) -> int:
        return len(self.feature)

    @property
    def is_leaf(self) -> np.ndarray:
        return self.feature == LEAF

    def depth(self) -> int:
        depths = np.zeros(self.node_count, dtype=np.int64)
        # Children always have larger ids than their parent.
        for node in range(self.node_count):
            if self.feature[node] != LEAF:
                depths[self.left[node]] = depths[node] + 1
                depths[self.right[node]] = depths[node] + 1
        return int(depths.max())

    def with_values(self, value: np.ndarray) -> "DecisionTree":
        return DecisionTree(
            feature=self.feature,
            threshold=self.threshold,
            left=self.left,
            right=self.right,
            value=np.asarray(value, dtype=np.float64),
            impurity=self.impurity,
            weighted_samples=self.weighted_samples,
            samples=self.samples,
            max_depth=self.max_depth,
            n_features=self.n_features,
            criterion=self.criterion,
        )

    def to_dict(self) -> dict:
        """
        Node-array JSON form. Per node:
          id               position in the array
          feature          split column, or null for a leaf
          threshold        split value (x <= threshold goes left), null for a leaf
          left, right      child ids, null for a leaf
          value            leaf output (internal nodes keep their own fitted value)
          impurity         gini or weighted variance at the node
          weighted_samples sum of sample weights reaching the node
          samples          number of training rows reaching the node
        """
        nodes = []
        for i in range(self.node_count):
            leaf = self.feature[i] == LEAF
            nodes.append(
                {
                    "id": i,
                    "feature": None if leaf else int(self.feature[i]),
                    "threshold": None if leaf else float(self.threshold[i]),
                    "left": None if leaf else int(self.left[i]),
                    "right": None if leaf else int(self.right[i]),
                    "value": float(self.value[i]),
                    "impurity": float(self.impurity[i]),
                    "weighted_samples": float(self.weighted_samples[i]),
                    "samples": int(self.samples[i]),
                }
            )
        return {
            "schema_version": config.SCHEMA_VERSION,
            "criterion": self.criterion,
            "max_depth": self.max_depth,
            "n_features": self.n_features,
            "nodes": nodes,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DecisionTree":
        nodes = data["nodes"]
        n = len(nodes)
        if n == 0:
            raise ValueError("tree has no nodes")

        def column(key, dtype, missing):
            return np.array(
                [missing if node[key] is None else node[key] for node in nodes],
                dtype=dtype,
            )

        for i, node in enumerate(nodes):
            if node["id"] != i:
                raise ValueError(f"node {i} carries id {node['id']}")

        tree = cls(
            feature=column("feature", np.int64, LEAF),
            threshold=column("threshold", np.float64, 0.0),
            left=column("left", np.int64, LEAF),
            right=column("right", np.int64, LEAF),
            value=column("value", np.float64, 0.0),
            impurity=column("impurity", np.float64, 0.0),
            weighted_samples=column("weighted_samples", np.float64, 0.0),
            samples=column("samples", np.int64, 0),
            max_depth=data["max_depth"],
            n_features=int(data["n_features"]),
            criterion=data["criterion"],
        )
        tree.check_structure()
        return tree

    def check_structure(self) -> None:
        """Every non-root node has exactly one parent with a smaller id."""
        parents = np.zeros(self.node_count, dtype=np.int64)
        for node in range(self.node_count):
            if self.feature[node] == LEAF:
                continue
            if not 0 <= self.feature[node] < self.n_features:
                raise ValueError(f"node {node} splits on unknown column {self.feature[node]}")
            for child in (self.left[node], self.right[node]):
                if not node < child < self.node_count:
                    raise ValueError(f"node {node} has invalid child {child}")
                parents[child] += 1
        if parents[0] != 0 or np.any(parents[1:] != 1):
            raise ValueError("node array contains orphans or shared children")
        if not np.all(np.isfinite(self.value[self.is_leaf])):
            raise ValueError("leaf values must be finite")


@dataclass(frozen=True)
class ExtraTreesModel:
    trees: List[DecisionTree]
    n_trees: int
    k_features: int
    min_samples_split: int
    seed: int
    feature_names: Tuple[str, ...] = field(default_factory=tuple)


@dataclass(frozen=True)
class ImportanceVector:
    feature_names: Tuple[str, ...]
    scores: np.ndarray

    def ranked(self) -> List[Tuple[str, float]]:
        """(name, score) pairs, ascending by score, ties by column order."""
        order = np.argsort(self.scores, kind="stable")
        return [(self.feature_names[i], float(self.scores[i])) for i in order]

    def lowest(self, n: int) -> List[str]:
        return [name for name, _ in self.ranked()[:n]]
