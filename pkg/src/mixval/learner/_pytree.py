"""Pure-Python tree-growing kernel.

Mirrors the compiled kernel (_ctree) operation for operation: same
feature-sampling RNG, same score arithmetic, same tie-breaking, same node
numbering. Every floating-point step is either a correctly-rounded IEEE
operation on exactly representable integers or an elementwise numpy op,
so the two kernels produce bit-identical trees; the equivalence test
compares their output arrays directly. Keep any change synchronized.
"""

from __future__ import annotations

import numpy as np

_M64 = (1 << 64) - 1


def _splitmix64(state: int) -> tuple[int, int]:
    # splitmix64: the stream both kernels use for feature subsampling
    state = (state + 0x9E3779B97F4A7C15) & _M64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31), state


def _feature_split(v: np.ndarray, ypos: np.ndarray, n1: int, min_leaf: int):
    """Best admissible split of one feature at one node.

    Returns None when the feature is constant on the node (does not
    consume the candidate budget), (-1.0, 0.0) when non-constant but no
    boundary satisfies min_leaf, else (score, threshold). The score is the
    size-weighted sum of children's label-count squares over child size;
    maximizing it minimizes weighted Gini impurity.
    """
    order = np.argsort(v)
    sv = v[order]
    m = sv.size
    if sv[0] == sv[m - 1]:
        return None
    csum = np.cumsum(ypos[order].astype(np.int64))
    nl = np.arange(1, m, dtype=np.int64)
    cut = (sv[1:] > sv[:-1]) & (nl >= min_leaf) & (m - nl >= min_leaf)
    if not cut.any():
        return -1.0, 0.0
    nl = nl[cut]
    nl1 = csum[:-1][cut]
    nl0 = nl - nl1
    nr = m - nl
    nr1 = n1 - nl1
    nr0 = nr - nr1
    score = (nl1 * nl1 + nl0 * nl0) / nl + (nr1 * nr1 + nr0 * nr0) / nr
    best = int(np.argmax(score))
    p = int(np.nonzero(cut)[0][best])
    a, b = float(sv[p]), float(sv[p + 1])
    thr = 0.5 * (a + b)
    if thr >= b:
        # midpoint rounded up to the upper value; clamp so b routes right
        thr = a
    return float(score[best]), thr


def grow_tree(X: np.ndarray, y: np.ndarray, max_depth: int, min_leaf: int,
              n_candidates: int, seed: int):
    """Grow one tree on (already bootstrapped) rows.

    max_depth == -1 means unlimited. Nodes are numbered in depth-first
    pre-order, left child first. Returns the five parallel node arrays of
    a Tree: feature, threshold, left, right, pos_frac.
    """
    n, d = X.shape
    ypos = y.astype(np.int64)
    idx = np.arange(n, dtype=np.int64)
    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    frac: list[float] = []
    state = seed & _M64
    stack = [(0, n, 0, -1, False)]
    while stack:
        start, end, depth, parent, is_left = stack.pop()
        node = len(feature)
        if parent >= 0:
            (left if is_left else right)[parent] = node
        seg = idx[start:end]
        m = end - start
        n1 = int(ypos[seg].sum())
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        frac.append(n1 / m)
        if n1 == 0 or n1 == m or m < 2 * min_leaf or depth == max_depth:
            continue
        found = 0
        best_score, best_f, best_thr = -1.0, -1, 0.0
        forder = list(range(d))
        i = 0
        while i < d and found < n_candidates:
            r, state = _splitmix64(state)
            j = i + r % (d - i)
            forder[i], forder[j] = forder[j], forder[i]
            f = forder[i]
            i += 1
            res = _feature_split(X[seg, f], ypos[seg], n1, min_leaf)
            if res is None:
                continue
            found += 1
            score, thr = res
            if score < 0.0:
                continue
            if score > best_score or (score == best_score and f < best_f):
                best_score, best_f, best_thr = score, f, thr
        if best_f < 0:
            continue
        go_left = X[seg, best_f] <= best_thr
        n_left = int(np.count_nonzero(go_left))
        idx[start:end] = np.concatenate([seg[go_left], seg[~go_left]])
        feature[node] = best_f
        threshold[node] = best_thr
        stack.append((start + n_left, end, depth + 1, node, False))
        stack.append((start, start + n_left, depth + 1, node, True))
    return (np.asarray(feature, dtype=np.int32),
            np.asarray(threshold, dtype=np.float64),
            np.asarray(left, dtype=np.int32),
            np.asarray(right, dtype=np.int32),
            np.asarray(frac, dtype=np.float64))
