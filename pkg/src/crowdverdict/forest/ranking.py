"""Information-gain feature ranking.

Gain for a feature is the reduction in label entropy (in bits) from
conditioning on the feature after equal-frequency binning: boundaries are
taken at the 1/b .. (b-1)/b order statistics and duplicate boundaries are
collapsed, so low-cardinality features get fewer bins and a constant feature
scores exactly 0.  Values equal to a boundary fall in the lower bin, matching
the ``<=`` convention of tree splits.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from ..errors import DataError

DEFAULT_BINS = 10


def _entropy_bits(counts: np.ndarray) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    h = 0.0
    for c in counts:
        if c > 0:
            p = c / total
            h -= p * math.log2(p)
    return h


def information_gain(column: np.ndarray, y: np.ndarray, n_bins: int = DEFAULT_BINS) -> float:
    """Gain of one feature column against 0/1 labels."""
    n = column.shape[0]
    ordered = np.sort(column)
    positions = [(n * k) // n_bins for k in range(1, n_bins)]
    edges = np.unique(ordered[positions])
    bins = np.searchsorted(edges, column, side="left")
    n_cells = len(edges) + 1
    punish = np.bincount(bins, weights=y, minlength=n_cells)
    total = np.bincount(bins, minlength=n_cells)
    h_label = _entropy_bits(np.array([y.sum(), n - y.sum()]))
    h_cond = 0.0
    for b in range(n_cells):
        if total[b] == 0:
            continue
        h_cond += (total[b] / n) * _entropy_bits(np.array([punish[b], total[b] - punish[b]]))
    return h_label - h_cond


def rank_features_information_gain(
    x: np.ndarray,
    y: np.ndarray,
    names: Sequence[str],
    n_bins: int = DEFAULT_BINS,
) -> list[tuple[str, float]]:
    """All features ranked by descending gain; ties break on feature index."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = x.shape[0]
    if x.shape[1] != len(names):
        raise DataError(f"{x.shape[1]} columns but {len(names)} feature names")
    punish = y.sum()
    if punish == 0 or punish == n:
        raise DataError("ranking requires both labels to be present")
    gains = [information_gain(x[:, j], y, n_bins) for j in range(x.shape[1])]
    order = sorted(range(len(gains)), key=lambda j: (-gains[j], j))
    return [(names[j], gains[j]) for j in order]


def rank_matrix(matrix, n_bins: int = DEFAULT_BINS) -> list[tuple[str, float]]:
    """Rank a FeatureMatrix (see :mod:`crowdverdict.features`)."""
    return rank_features_information_gain(matrix.x, matrix.y, matrix.names, n_bins)
