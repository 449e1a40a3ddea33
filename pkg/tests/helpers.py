"""Shared builders and brute-force oracles used across test modules."""

import numpy as np

from mixval.core import CollectionSpec, build_dataset, enumerate_complete


def members(n, prefix="d"):
    """n zero-padded ids so lexical order matches numeric order."""
    width = len(str(n))
    return tuple(f"{prefix}{i + 1:0{width}d}" for i in range(n))


def complete_unordered(n_members, arity, labeler=None, name="drugs"):
    """Complete choose(D, N) dataset over one collection."""
    spec = CollectionSpec(name=name, members=members(n_members))
    keys = enumerate_complete([spec], arity, ordered=False)
    labeler = labeler or (lambda i, key: i % 2)
    rows = [(key.local_ids, labeler(i, key)) for i, key in enumerate(keys)]
    return build_dataset([spec], arity, False, rows)


def complete_ordered(sizes, labeler=None):
    """Complete Cartesian-product dataset, one collection per slot."""
    specs = [
        CollectionSpec(name=f"slot_{i + 1}",
                       members=members(n, prefix=chr(ord("a") + i)))
        for i, n in enumerate(sizes)
    ]
    keys = enumerate_complete(specs, len(sizes), ordered=True)
    labeler = labeler or (lambda i, key: i % 2)
    rows = [(key.local_ids, labeler(i, key)) for i, key in enumerate(keys)]
    return build_dataset(specs, len(sizes), True, rows)


def auc_oracle(scores, labels):
    """All-pairs Mann-Whitney AUC: wins + half-ties over pos x neg pairs."""
    pos = [s for s, l in zip(scores, labels) if l == 1]
    neg = [s for s, l in zip(scores, labels) if l != 1]
    total = 0.0
    for p in pos:
        for q in neg:
            if p > q:
                total += 1.0
            elif p == q:
                total += 0.5
    return total / (len(pos) * len(neg))


def random_auc_instance(rng, max_len=50):
    """Scores with deliberate ties plus labels containing both classes."""
    n = int(rng.integers(2, max_len + 1))
    if rng.integers(0, 2):
        scores = rng.integers(0, 4, size=n) / 4.0  # heavy ties
    else:
        scores = rng.random(n)
    labels = np.zeros(n, dtype=np.int64)
    labels[: int(rng.integers(1, n))] = 1  # at least one of each class
    rng.shuffle(labels)
    return scores, labels


def best_split_oracle(X, y, min_leaf):
    """Exhaustive best (feature, threshold) under the forest's split rule.

    Scores every boundary between consecutive distinct values of every
    feature with the same count-based impurity proxy and float arithmetic
    the tree kernels use, preferring the lowest threshold within a feature
    and the lowest feature index across features on ties. Returns None
    when no boundary satisfies min_leaf.
    """
    n, d = X.shape
    n_pos = int(y.sum())
    best = None  # (score, feature, threshold)
    for f in range(d):
        vals = np.unique(X[:, f])
        for a, b in zip(vals, vals[1:]):
            thr = 0.5 * (float(a) + float(b))
            if thr >= float(b):
                thr = float(a)
            go_left = X[:, f] <= thr
            nl = int(np.count_nonzero(go_left))
            nr = n - nl
            if nl < min_leaf or nr < min_leaf:
                continue
            nl1 = int(y[go_left].sum())
            nr1 = n_pos - nl1
            nl0, nr0 = nl - nl1, nr - nr1
            score = (nl1 * nl1 + nl0 * nl0) / nl + (nr1 * nr1 + nr0 * nr0) / nr
            # ascending scan order makes both tie-break rules "keep first"
            if best is None or score > best[0]:
                best = (score, f, thr)
    return best
