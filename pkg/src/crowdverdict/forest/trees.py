"""CART decision trees and a bagged random forest over binary verdicts.

Trees split on Gini impurity; leaves carry the punish fraction of their
training rows and forests score by averaging leaf fractions.  Fits are fully
reproducible: per-tree RNG streams are spawned from the seed
(``numpy.random.SeedSequence(seed).spawn``), feature subsets are drawn per
node in preorder, and bootstrap resampling happens over a canonical row order
(rows sorted by the SHA-1 of their per-column dense ranks plus label), which
makes a fit invariant to training-row order and to strictly monotone
per-feature transformations.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..domain import Decision
from ..errors import DataError, SchemaMismatchError
from ._backend import get_kernel

MODEL_FORMAT = "crowdverdict-forest/1"


@dataclass(frozen=True)
class TrainConfig:
    n_trees: int = 200
    max_depth: int | None = None
    min_leaf: int = 5
    features_per_split: int | None = None  # default: ceil(sqrt(n_features))
    bootstrap: bool = True
    rng_seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise DataError("n_trees must be >= 1")
        if self.min_leaf < 1:
            raise DataError("min_leaf must be >= 1")
        if self.max_depth is not None and self.max_depth < 1:
            raise DataError("max_depth must be >= 1 or None")
        if self.features_per_split is not None and self.features_per_split < 1:
            raise DataError("features_per_split must be >= 1 or None")

    def resolved_features_per_split(self, n_features: int) -> int:
        k = self.features_per_split
        if k is None:
            k = math.ceil(math.sqrt(n_features))
        if k > n_features:
            raise DataError(
                f"features_per_split {k} exceeds the {n_features} available features"
            )
        return k

    def to_dict(self) -> dict:
        return {
            "n_trees": self.n_trees,
            "max_depth": self.max_depth,
            "min_leaf": self.min_leaf,
            "features_per_split": self.features_per_split,
            "bootstrap": self.bootstrap,
            "rng_seed": self.rng_seed,
        }


@dataclass(frozen=True)
class Leaf:
    punish_fraction: float
    sample_count: int


@dataclass
class Split:
    feature_index: int
    threshold: float
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None


TreeNode = Leaf | Split


@dataclass
class RandomForest:
    trees: tuple[TreeNode, ...]
    n_features: int
    schema_version: str
    config: TrainConfig
    _flat: list | None = field(default=None, repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.trees)


# --------------------------------------------------------------------------
# Impurity and split search


def gini_impurity(labels: Sequence) -> float:
    """Gini impurity ``1 - p^2 - (1-p)^2`` of a non-empty label multiset."""
    labels = list(labels)
    if not labels:
        raise DataError("gini_impurity requires a non-empty label multiset")
    punish = sum(1 for v in labels if _is_punish(v))
    p = punish / len(labels)
    return 1.0 - p * p - (1.0 - p) * (1.0 - p)


def _is_punish(value) -> bool:
    if isinstance(value, Decision):
        return value is Decision.PUNISH
    return bool(value)


@dataclass(frozen=True)
class SplitChoice:
    feature_index: int
    threshold: float
    impurity_decrease: float


def best_split(
    x: np.ndarray,
    y: np.ndarray,
    feature_subset: Sequence[int] | None = None,
    min_leaf: int = 1,
    backend: str | None = None,
) -> SplitChoice | None:
    """Best Gini-decrease split over candidate thresholds, or None.

    Candidate thresholds are midpoints between consecutive distinct sorted
    values of each feature; both children must keep ``min_leaf`` rows.  Ties
    break toward the lower feature index, then the lower threshold.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.uint8)
    n = x.shape[0]
    if n < 2 * min_leaf:
        raise DataError(f"best_split needs at least {2 * min_leaf} rows, got {n}")
    if feature_subset is None:
        feats = np.arange(x.shape[1])
        sub = x
    else:
        feats = np.asarray(sorted(feature_subset), dtype=np.int64)
        sub = np.ascontiguousarray(x[:, feats])
    kernel = get_kernel(backend)
    j, thr, s = kernel(sub, y, min_leaf)
    if j < 0:
        return None
    return SplitChoice(
        feature_index=int(feats[j]),
        threshold=float(thr),
        impurity_decrease=2.0 * s / n,
    )


# --------------------------------------------------------------------------
# Fitting


def _canonical_order(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Row order independent of input order and of monotone feature transforms.

    Rows are sorted by the SHA-1 digest of their per-column dense ranks plus
    label byte.  Digest-equal rows are fully identical and therefore
    interchangeable.
    """
    n, d = x.shape
    ranks = np.empty((n, d), dtype=np.uint32)
    for j in range(d):
        _, inverse = np.unique(x[:, j], return_inverse=True)
        ranks[:, j] = inverse
    digests = [
        hashlib.sha1(ranks[i].tobytes() + bytes([y[i]])).digest() for i in range(n)
    ]
    return np.asarray(sorted(range(n), key=digests.__getitem__), dtype=np.int64)


def _grow_tree(
    xs: np.ndarray,
    ys: np.ndarray,
    sample_idx: np.ndarray,
    gen: np.random.Generator,
    config: TrainConfig,
    k: int,
    kernel,
) -> TreeNode:
    d = xs.shape[1]
    holder = Split(feature_index=-1, threshold=0.0)
    # Explicit preorder stack: (row indices, depth, parent node, side).
    stack = [(sample_idx, 0, holder, "left")]
    while stack:
        idx, depth, parent, side = stack.pop()
        n = idx.size
        punish = int(ys[idx].sum())
        node: TreeNode | None = None
        if (
            punish == 0
            or punish == n
            or n < 2 * config.min_leaf
            or (config.max_depth is not None and depth >= config.max_depth)
        ):
            node = Leaf(punish / n, n)
        else:
            feats = np.sort(gen.permutation(d)[:k])
            sub = np.ascontiguousarray(xs[np.ix_(idx, feats)])
            ysub = np.ascontiguousarray(ys[idx])
            j, thr, s = kernel(sub, ysub, config.min_leaf)
            if j < 0:
                node = Leaf(punish / n, n)
            else:
                feature = int(feats[j])
                mask = xs[idx, feature] <= thr
                node = Split(feature, float(thr))
                # Push right first so the left subtree is grown first (preorder).
                stack.append((idx[~mask], depth + 1, node, "right"))
                stack.append((idx[mask], depth + 1, node, "left"))
        if side == "left":
            parent.left = node
        else:
            parent.right = node
    return holder.left


def fit_forest_arrays(
    x: np.ndarray,
    y: np.ndarray,
    config: TrainConfig = TrainConfig(),
    schema_version: str = "",
    backend: str | None = None,
) -> RandomForest:
    """Fit a forest on a raw (n, d) matrix and 0/1 punish labels."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.uint8)
    n, d = x.shape
    if n < 2:
        raise DataError("training requires at least 2 rows")
    punish = int(y.sum())
    if punish == 0 or punish == n:
        raise DataError(
            "training labels contain a single class; select a training set with "
            "both punish and pardon cases"
        )
    k = config.resolved_features_per_split(d)
    kernel = get_kernel(backend)

    order = _canonical_order(x, y)
    xs = np.ascontiguousarray(x[order])
    ys = np.ascontiguousarray(y[order])

    children = np.random.SeedSequence(config.rng_seed).spawn(config.n_trees)
    trees = []
    for child in children:
        gen = np.random.Generator(np.random.PCG64(child))
        if config.bootstrap:
            sample_idx = gen.integers(0, n, size=n)
        else:
            sample_idx = np.arange(n)
        trees.append(_grow_tree(xs, ys, sample_idx, gen, config, k, kernel))
    return RandomForest(
        trees=tuple(trees), n_features=d, schema_version=schema_version, config=config
    )


def fit_forest(matrix, config: TrainConfig = TrainConfig(), backend: str | None = None) -> RandomForest:
    """Fit a forest on a FeatureMatrix (see :mod:`crowdverdict.features`)."""
    return fit_forest_arrays(
        matrix.x, matrix.y, config, schema_version=matrix.schema_version, backend=backend
    )


# --------------------------------------------------------------------------
# Prediction


def _walk(node: TreeNode, vector: np.ndarray) -> float:
    while isinstance(node, Split):
        node = node.left if vector[node.feature_index] <= node.threshold else node.right
    return node.punish_fraction


def predict_proba(forest: RandomForest, vector: np.ndarray) -> float:
    """Punish probability for one feature vector: mean leaf fraction over trees."""
    vector = np.asarray(vector, dtype=np.float64)
    if vector.ndim != 1 or vector.shape[0] != forest.n_features:
        raise DataError(
            f"feature vector has dimension {vector.shape}, expected ({forest.n_features},)"
        )
    return sum(_walk(tree, vector) for tree in forest.trees) / len(forest.trees)


def _flatten(tree: TreeNode) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    feats: list[int] = []
    thrs: list[float] = []
    lefts: list[int] = []
    rights: list[int] = []
    values: list[float] = []
    stack = [(tree, -1, "l")]
    while stack:
        node, parent, side = stack.pop()
        pos = len(feats)
        if parent >= 0:
            if side == "l":
                lefts[parent] = pos
            else:
                rights[parent] = pos
        if isinstance(node, Leaf):
            feats.append(-1)
            thrs.append(0.0)
            lefts.append(pos)
            rights.append(pos)
            values.append(node.punish_fraction)
        else:
            feats.append(node.feature_index)
            thrs.append(node.threshold)
            lefts.append(pos)
            rights.append(pos)
            values.append(0.0)
            stack.append((node.right, pos, "r"))
            stack.append((node.left, pos, "l"))
    return (
        np.asarray(feats, dtype=np.int64),
        np.asarray(thrs, dtype=np.float64),
        np.asarray(lefts, dtype=np.int64),
        np.asarray(rights, dtype=np.int64),
        np.asarray(values, dtype=np.float64),
    )


def predict_matrix(forest: RandomForest, x: np.ndarray) -> np.ndarray:
    """Punish probabilities for every row of ``x``."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != forest.n_features:
        raise DataError(f"matrix has shape {x.shape}, expected (n, {forest.n_features})")
    if forest._flat is None:
        forest._flat = [_flatten(tree) for tree in forest.trees]
    n = x.shape[0]
    rows = np.arange(n)
    total = np.zeros(n, dtype=np.float64)
    for feats, thrs, lefts, rights, values in forest._flat:
        cur = np.zeros(n, dtype=np.int64)
        while True:
            at_leaf = feats[cur] < 0
            if at_leaf.all():
                break
            go_left = x[rows, np.maximum(feats[cur], 0)] <= thrs[cur]
            nxt = np.where(go_left, lefts[cur], rights[cur])
            cur = np.where(at_leaf, cur, nxt)
        total += values[cur]
    return total / len(forest.trees)


# --------------------------------------------------------------------------
# Serialization


def _tree_to_nodes(tree: TreeNode) -> list[dict]:
    """Preorder node list with child indices (robust to arbitrary depth)."""
    nodes: list[dict] = []
    stack = [(tree, -1, "l")]
    while stack:
        node, parent, side = stack.pop()
        pos = len(nodes)
        if parent >= 0:
            nodes[parent]["l" if side == "l" else "r"] = pos
        if isinstance(node, Leaf):
            nodes.append({"p": node.punish_fraction, "n": node.sample_count})
        else:
            nodes.append({"f": node.feature_index, "t": node.threshold, "l": -1, "r": -1})
            stack.append((node.right, pos, "r"))
            stack.append((node.left, pos, "l"))
    return nodes


def _tree_from_nodes(nodes: list[dict]) -> TreeNode:
    built: list[TreeNode] = []
    for obj in nodes:
        if "p" in obj:
            built.append(Leaf(float(obj["p"]), int(obj["n"])))
        else:
            built.append(Split(int(obj["f"]), float(obj["t"])))
    for obj, node in zip(nodes, built):
        if isinstance(node, Split):
            node.left = built[obj["l"]]
            node.right = built[obj["r"]]
    return built[0]


def forest_to_dict(forest: RandomForest) -> dict:
    return {
        "format": MODEL_FORMAT,
        "schema_version": forest.schema_version,
        "n_features": forest.n_features,
        "config": forest.config.to_dict(),
        "trees": [_tree_to_nodes(tree) for tree in forest.trees],
    }


def forest_from_dict(obj: dict) -> RandomForest:
    if obj.get("format") != MODEL_FORMAT:
        raise DataError(f"not a {MODEL_FORMAT} model file")
    cfg = obj["config"]
    return RandomForest(
        trees=tuple(_tree_from_nodes(nodes) for nodes in obj["trees"]),
        n_features=int(obj["n_features"]),
        schema_version=str(obj["schema_version"]),
        config=TrainConfig(
            n_trees=cfg["n_trees"],
            max_depth=cfg["max_depth"],
            min_leaf=cfg["min_leaf"],
            features_per_split=cfg["features_per_split"],
            bootstrap=cfg["bootstrap"],
            rng_seed=cfg["rng_seed"],
        ),
    )


def serialize_forest(forest: RandomForest) -> str:
    return json.dumps(forest_to_dict(forest), sort_keys=True, separators=(",", ":"))


def save_model(forest: RandomForest, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_forest(forest))
        fh.write("\n")


def load_model(path, expected_schema_version: str | None = None) -> RandomForest:
    with open(path, "r", encoding="utf-8") as fh:
        forest = forest_from_dict(json.load(fh))
    if expected_schema_version is not None and forest.schema_version != expected_schema_version:
        raise SchemaMismatchError(
            f"model was trained against schema {forest.schema_version!r}, "
            f"expected {expected_schema_version!r}"
        )
    return forest
