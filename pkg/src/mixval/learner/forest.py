"""Random forest of axis-aligned Gini trees.

The forest is grown by one of two interchangeable tree kernels: a compiled
extension (mixval.learner._ctree) and a pure-Python mirror
(mixval.learner._pytree). Both implement the same algorithm operation for
operation, including the in-kernel feature-sampling RNG, so a fit is
bit-identical regardless of which one ran. Selection happens per fit call
("auto" prefers the compiled kernel, falls back to Python); setting the
MIXVAL_PURE_PYTHON environment variable forces the fallback.

Everything around the kernel (bootstrap resampling, per-tree seeding,
prediction) is shared code operating on plain numpy arrays.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ..errors import DimensionMismatch, EmptyTrainingSet

PURE_PYTHON_ENV = "MIXVAL_PURE_PYTHON"


@dataclass(frozen=True)
class LearnerParams:
    """Forest hyperparameters. Defaults follow common random-forest
    practice: 100 trees, unlimited depth, single-sample leaves, sqrt(d)
    candidate features per split."""

    n_trees: int = 100
    max_depth: int | None = None
    min_leaf: int = 1
    features_per_split: int | str = "sqrt"
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if self.min_leaf < 1:
            raise ValueError("min_leaf must be >= 1")
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError("max_depth must be >= 1 or None")
        fps = self.features_per_split
        if fps != "sqrt" and not (isinstance(fps, int) and fps >= 1):
            raise ValueError("features_per_split must be 'sqrt' or an int >= 1")


class Tree(NamedTuple):
    """One grown tree as parallel node arrays.

    ``feature[i] == -1`` marks a leaf; internal nodes route queries left
    when ``x[feature[i]] <= threshold[i]``. ``pos_frac`` holds the
    positive-label fraction of the training rows that reached each node.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    pos_frac: np.ndarray


@dataclass(frozen=True)
class FittedModel:
    """An immutable trained forest. ``n_features`` is None for constant
    models (majority baseline), which accept any query width."""

    trees: tuple[Tree, ...]
    n_features: int | None


def _python_kernel():
    from . import _pytree
    return _pytree.grow_tree


def _compiled_kernel():
    from . import _ctree
    return _ctree.grow_tree


def resolve_kernel(backend: str = "auto"):
    """Pick a tree kernel; returns (callable, backend_name)."""
    if backend == "python":
        return _python_kernel(), "python"
    if backend == "compiled":
        return _compiled_kernel(), "compiled"
    if backend != "auto":
        raise ValueError(f"unknown backend {backend!r}")
    if os.environ.get(PURE_PYTHON_ENV):
        return _python_kernel(), "python"
    try:
        return _compiled_kernel(), "compiled"
    except ImportError:
        return _python_kernel(), "python"


def active_backend(backend: str = "auto") -> str:
    """Name of the kernel a fit would use right now."""
    return resolve_kernel(backend)[1]


def _check_features(features) -> np.ndarray:
    X = np.ascontiguousarray(features, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionMismatch(f"features must be 2-D, got shape {X.shape}")
    if not np.isfinite(X).all():
        raise ValueError("features must be finite")
    return X


def _check_labels(labels, n_rows: int) -> np.ndarray:
    y = np.asarray(labels)
    if y.shape != (n_rows,):
        raise DimensionMismatch(f"{n_rows} rows vs {y.shape} labels")
    if not np.isin(y, (0, 1)).all():
        raise ValueError("labels must be binary (0/1)")
    return y.astype(np.uint8)


def fit(features, labels, params: LearnerParams = LearnerParams(),
        backend: str = "auto") -> FittedModel:
    """Train a forest: each tree fits a same-size bootstrap resample,
    deterministic given ``params.seed``."""
    X = _check_features(features)
    n, d = X.shape
    if n == 0:
        raise EmptyTrainingSet("no training rows")
    y = _check_labels(labels, n)
    if params.features_per_split == "sqrt":
        n_candidates = max(1, math.isqrt(d))
    else:
        n_candidates = params.features_per_split
    max_depth = -1 if params.max_depth is None else params.max_depth
    kernel, _ = resolve_kernel(backend)

    trees = []
    for child in np.random.SeedSequence(params.seed).spawn(params.n_trees):
        g = np.random.default_rng(child)
        boot = g.integers(0, n, size=n, dtype=np.int64)
        hi = g.integers(0, 2 ** 32, dtype=np.uint64)
        lo = g.integers(0, 2 ** 32, dtype=np.uint64)
        kernel_seed = int((hi << np.uint64(32)) | lo)
        arrays = kernel(X[boot], y[boot], max_depth, params.min_leaf,
                        n_candidates, kernel_seed)
        trees.append(Tree(*arrays))
    return FittedModel(trees=tuple(trees), n_features=d)


def _tree_scores(tree: Tree, X: np.ndarray) -> np.ndarray:
    node = np.zeros(X.shape[0], dtype=np.int32)
    live = np.nonzero(tree.feature[node] >= 0)[0]
    while live.size:
        at = node[live]
        go_left = X[live, tree.feature[at]] <= tree.threshold[at]
        node[live] = np.where(go_left, tree.left[at], tree.right[at])
        live = live[tree.feature[node[live]] >= 0]
    return tree.pos_frac[node]


def _check_query(model: FittedModel, features) -> np.ndarray:
    X = np.ascontiguousarray(features, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionMismatch(f"features must be 2-D, got shape {X.shape}")
    if model.n_features is not None and X.shape[1] != model.n_features:
        raise DimensionMismatch(
            f"model trained on {model.n_features} features, queried with {X.shape[1]}")
    return X


def predict_score(model: FittedModel, features) -> np.ndarray:
    """Mean over trees of the reached leaf's positive fraction, in [0, 1]."""
    X = _check_query(model, features)
    acc = np.zeros(X.shape[0], dtype=np.float64)
    for tree in model.trees:
        acc += _tree_scores(tree, X)
    return acc / len(model.trees)


def predict_class(model: FittedModel, features, threshold: float = 0.5) -> np.ndarray:
    """Score thresholded at ``threshold`` (>= maps to class 1)."""
    return (predict_score(model, features) >= threshold).astype(np.int64)


def majority_baseline(labels) -> FittedModel:
    """Constant model predicting the training-majority class (ties -> 0)
    with score exactly 0.0 or 1.0."""
    y = np.asarray(labels)
    if y.size == 0:
        raise EmptyTrainingSet("no training labels")
    y = _check_labels(y, y.size)
    cls = 1 if int(y.sum()) * 2 > y.size else 0
    leaf = Tree(feature=np.array([-1], dtype=np.int32),
                threshold=np.zeros(1, dtype=np.float64),
                left=np.array([-1], dtype=np.int32),
                right=np.array([-1], dtype=np.int32),
                pos_frac=np.array([float(cls)], dtype=np.float64))
    return FittedModel(trees=(leaf,), n_features=None)


_FORMAT = "mixval-forest-1"


def save_model(model: FittedModel, path) -> None:
    """Serialize to a self-describing .npz archive."""
    counts = np.array([t.feature.size for t in model.trees], dtype=np.int64)
    np.savez(
        path,
        format=np.array(_FORMAT),
        n_features=np.array(-1 if model.n_features is None else model.n_features,
                            dtype=np.int64),
        node_counts=counts,
        feature=np.concatenate([t.feature for t in model.trees]),
        threshold=np.concatenate([t.threshold for t in model.trees]),
        left=np.concatenate([t.left for t in model.trees]),
        right=np.concatenate([t.right for t in model.trees]),
        pos_frac=np.concatenate([t.pos_frac for t in model.trees]),
    )


def load_model(path) -> FittedModel:
    """Inverse of ``save_model``; round-trips predictions exactly."""
    with np.load(path) as data:
        if str(data["format"]) != _FORMAT:
            raise ValueError(f"not a {_FORMAT} file")
        counts = data["node_counts"]
        bounds = np.concatenate([[0], np.cumsum(counts)])
        trees = tuple(
            Tree(*(data[name][bounds[i]:bounds[i + 1]]
                   for name in ("feature", "threshold", "left", "right", "pos_frac")))
            for i in range(counts.size)
        )
        n_features = int(data["n_features"])
    return FittedModel(trees=trees, n_features=None if n_features < 0 else n_features)
