"""Pure-numpy split-search kernel (fallback for the compiled extension).

Both kernels follow the same contract and the same floating-point evaluation
order, so they return bit-identical results:

``scan_best_split(x, y, min_leaf) -> (column, threshold, score)``

* ``x`` is the node's gathered (n, k) float64 sub-matrix, ``y`` the (n,) uint8
  punish labels.
* Candidate thresholds are midpoints between consecutive distinct sorted
  values; both children must keep at least ``min_leaf`` rows.
* ``score`` is ``P(n-P)/n - impL - impR`` with ``imp = c(m-c)/m`` over child
  punish counts; the weighted Gini decrease equals ``2 * score / n``.
* Ties are broken by the lower column index, then the lower threshold.
* ``column`` is -1 when no split strictly decreases impurity.
"""

from __future__ import annotations

import numpy as np


def scan_best_split(x: np.ndarray, y: np.ndarray, min_leaf: int) -> tuple[int, float, float]:
    n, k = x.shape
    total = int(y.sum())
    parent = (total * (n - total)) / n
    best_j = -1
    best_thr = 0.0
    best_s = 0.0
    y64 = y.astype(np.int64)
    for j in range(k):
        col = x[:, j]
        order = np.argsort(col, kind="quicksort")
        sv = col[order]
        cum = np.cumsum(y64[order])
        n_left = np.arange(1, n, dtype=np.int64)
        boundary = sv[:-1] != sv[1:]
        valid = boundary & (n_left >= min_leaf) & (n - n_left >= min_leaf)
        if not valid.any():
            continue
        c_left = cum[:-1]
        c_right = total - c_left
        n_right = n - n_left
        with np.errstate(invalid="ignore"):
            imp_left = (c_left * (n_left - c_left)) / n_left
            imp_right = (c_right * (n_right - c_right)) / n_right
            s = parent - imp_left - imp_right
        s[~valid] = -np.inf
        i = int(np.argmax(s))
        s_i = float(s[i])
        if s_i > best_s and s_i > 0.0:
            thr = (sv[i] + sv[i + 1]) / 2.0
            if thr >= sv[i + 1]:  # midpoint rounded up between adjacent floats
                thr = sv[i]
            best_j = j
            best_thr = float(thr)
            best_s = s_i
    return best_j, best_thr, best_s
