"""Descriptor tables, mixture-level combination, and randomization baselines.

Descriptors live on constituents (keyed by local id); a mixture's feature
vector is derived from its constituents' vectors by one of two combiners:

* ``ordered-concat``: concatenate in slot order (dimension ``N * L``);
  only meaningful for ordered mixtures.
* ``sum-range``: elementwise sum followed by elementwise max minus min
  (dimension ``2 * L``). Invariant under constituent reordering; at N=2
  the second half is just ``|a - b|``.

Two null-model tools support validation: ``gen_pseudodescriptors`` draws
random vectors per constituent (the combined features inherit the mixture
overlap structure but carry no chemistry), and ``y_randomize`` permutes a
training label vector (features untouched).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .core import CollectionSpec, Dataset, MixtureKey
from .errors import DimensionMismatch, MissingDescriptor

COMBINER_VARIANTS = ("ordered-concat", "sum-range")


@dataclass(frozen=True)
class CombinerPolicy:
    """How constituent vectors become one mixture vector."""

    variant: str = "sum-range"

    def __post_init__(self):
        if self.variant not in COMBINER_VARIANTS:
            raise ValueError(f"unknown combiner variant {self.variant!r}")

    @property
    def width_factor(self) -> tuple[str, int]:
        """Output width as ("L" multiplier, value): N*L or 2*L."""
        return ("N", 1) if self.variant == "ordered-concat" else ("2", 2)


@dataclass(frozen=True)
class DescriptorTable:
    """Constituent-level descriptor vectors of one common length.

    ``kind`` distinguishes measured descriptors ("real") from the random
    stand-ins ("pseudo") used for null baselines.
    """

    length: int
    kind: str
    vectors: Mapping[str, np.ndarray] = field(repr=False)

    def vector(self, local_id: str) -> np.ndarray:
        try:
            return self.vectors[local_id]
        except KeyError:
            raise MissingDescriptor(f"no descriptor for {local_id!r}") from None

    def check_covers(self, dataset: Dataset) -> None:
        """Raise MissingDescriptor unless every constituent has an entry."""
        for spec in dataset.collections:
            for member in spec.members:
                if member not in self.vectors:
                    raise MissingDescriptor(
                        f"no descriptor for {member!r} in collection {spec.name!r}")


def _policy_variant(policy) -> str:
    variant = policy.variant if isinstance(policy, CombinerPolicy) else policy
    if variant not in COMBINER_VARIANTS:
        raise ValueError(f"unknown combiner variant {variant!r}")
    return variant


def combine(key: MixtureKey, table: DescriptorTable, policy) -> np.ndarray:
    """Build one mixture feature vector from its constituents' descriptors.

    ``policy`` may be a CombinerPolicy or a bare variant name.
    """
    variant = _policy_variant(policy)
    constituents = key.constituents
    if variant == "sum-range":
        # float sums are order sensitive in the last ulp; fix the order so
        # permutation invariance holds bit for bit, not just approximately
        constituents = tuple(sorted(constituents))
    vecs = [table.vector(c.local_id) for c in constituents]
    for v in vecs:
        if v.shape != (table.length,):
            raise DimensionMismatch(
                f"descriptor shaped {v.shape} in a table of length {table.length}")
    if variant == "ordered-concat":
        return np.concatenate(vecs)
    stack = np.stack(vecs)
    return np.concatenate([stack.sum(axis=0),
                           stack.max(axis=0) - stack.min(axis=0)])


def combine_matrix(keys: Iterable[MixtureKey], table: DescriptorTable,
                   policy) -> np.ndarray:
    """Stack ``combine`` over keys into an (n, features) float64 matrix."""
    keys = list(keys)
    rows = [combine(key, table, policy) for key in keys]
    if not rows:
        return np.empty((0, 0), dtype=np.float64)
    return np.asarray(rows, dtype=np.float64)


def gen_pseudodescriptors(collection: CollectionSpec, length: int, seed: int,
                          kind: str = "binary") -> DescriptorTable:
    """Draw a random descriptor per collection member.

    ``kind`` picks the marginal: "binary" gives independent fair bits,
    "gaussian" independent standard normals. Members are visited in
    sorted order, so the table depends only on the seed and the roster.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    if kind not in ("binary", "gaussian"):
        raise ValueError(f"unknown pseudodescriptor kind {kind!r}")
    rng = np.random.default_rng(seed)
    vectors: dict[str, np.ndarray] = {}
    for local_id in sorted(collection.members):
        if kind == "binary":
            vec = rng.integers(0, 2, size=length).astype(np.float64)
        else:
            vec = rng.standard_normal(length)
        vec.flags.writeable = False
        vectors[local_id] = vec
    return DescriptorTable(length=length, kind="pseudo", vectors=vectors)


def constituent_pool(dataset: Dataset) -> CollectionSpec:
    """All distinct constituent ids of a dataset as one synthetic
    collection, for generating pseudodescriptors over every slot."""
    ids = sorted({m for spec in dataset.collections for m in spec.members})
    return CollectionSpec(name="constituents", members=tuple(ids))


def y_randomize(labels, seed: int) -> np.ndarray:
    """Return a uniformly permuted copy of a label vector."""
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)
    return labels[rng.permutation(labels.size)]
