"""Classification metrics and their across-fold aggregation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyList, LengthMismatch, SingleClassValidation

METRIC_NAMES = ("auc_roc", "accuracy")


@dataclass(frozen=True)
class FoldMetric:
    """One metric value for one (strategy, mode, stratum, fold) cell."""

    strategy: str
    mode: str
    stratum: str
    fold_index: int
    metric: str
    value: float
    n_validation: int

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"metric value {self.value} outside [0, 1]")
        if self.n_validation < 1:
            raise ValueError("empty validation stratum")


def auc_roc(scores, labels) -> float:
    """Mann-Whitney AUC: P(random positive outscores random negative),
    ties counted half. Tied scores share their midrank.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape:
        raise LengthMismatch(f"{scores.shape[0]} scores vs {labels.shape[0]} labels")
    if scores.size == 0:
        raise EmptyList("no scores")
    n_pos = int(np.count_nonzero(labels == 1))
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClassValidation("both classes required for AUC")
    _, inverse, counts = np.unique(scores, return_inverse=True, return_counts=True)
    # midrank of a tied block = last 1-based rank in the block - (ties-1)/2
    midranks = np.cumsum(counts).astype(np.float64) - (counts - 1) / 2.0
    ranks = midranks[inverse]
    pos_rank_sum = float(ranks[labels == 1].sum())
    return (pos_rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def accuracy(predicted, labels) -> float:
    """Fraction of exact matches."""
    predicted = np.asarray(predicted)
    labels = np.asarray(labels)
    if predicted.shape != labels.shape:
        raise LengthMismatch(
            f"{predicted.shape[0]} predictions vs {labels.shape[0]} labels")
    if predicted.size == 0:
        raise EmptyList("no predictions")
    return float(np.count_nonzero(predicted == labels)) / predicted.size


def aggregate(values) -> tuple[float, float]:
    """Mean and sample standard deviation (n-1 denominator, 0 when n=1)."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise EmptyList("nothing to aggregate")
    mean = float(values.mean())
    std = 0.0 if values.size == 1 else float(values.std(ddof=1))
    return mean, std
