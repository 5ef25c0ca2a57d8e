"""Random forest classifier: CART trees, bagging, and feature ranking.

The split-search inner loop runs on a compiled extension when available and
falls back to a bit-identical numpy kernel otherwise; see
``benchmarks/forest_backends.py`` for a speed comparison.
"""

from ._backend import HAVE_COMPILED, available_backends, default_backend
from .ranking import information_gain, rank_features_information_gain, rank_matrix
from .trees import (
    Leaf,
    RandomForest,
    Split,
    SplitChoice,
    TrainConfig,
    TreeNode,
    best_split,
    fit_forest,
    fit_forest_arrays,
    forest_from_dict,
    forest_to_dict,
    gini_impurity,
    load_model,
    predict_matrix,
    predict_proba,
    save_model,
    serialize_forest,
)

__all__ = [
    "HAVE_COMPILED",
    "available_backends",
    "default_backend",
    "information_gain",
    "rank_features_information_gain",
    "rank_matrix",
    "Leaf",
    "RandomForest",
    "Split",
    "SplitChoice",
    "TrainConfig",
    "TreeNode",
    "best_split",
    "fit_forest",
    "fit_forest_arrays",
    "forest_from_dict",
    "forest_to_dict",
    "gini_impurity",
    "load_model",
    "predict_matrix",
    "predict_proba",
    "save_model",
    "serialize_forest",
]
