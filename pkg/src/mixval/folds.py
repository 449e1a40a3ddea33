"""Cross-validation splits that respect mixture composition.

Mixtures sharing constituents have statistically dependent properties, so a
random split over mixtures lets a model score well by recognizing familiar
constituents rather than by learning anything transferable. The splits here
instead partition each *collection* into an interior block (training draws
only from it) and an exterior remainder, then stratify validation mixtures
by how many of their constituents are exterior:

* single collection, unordered: stratum ``m`` holds mixtures with exactly
  ``m`` exterior constituents ("m compounds out"), for ``m`` in 1..N;
* one collection per slot, ordered: the strata are indexed by the nonempty
  subsets of slots drawing from their exteriors, giving ``2**N - 1``
  strata per fold.

``standard_split`` provides the conventional random k-fold over mixtures
for comparison; it is only appropriate when the model's job is to fill in
missing entries among the same constituents.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Dataset, MixtureKey
from .errors import PartitionMismatch, TooManyFolds

FoldKeys = frozenset[MixtureKey]


@dataclass(frozen=True)
class FoldPartition:
    """Per-collection interior/exterior split for one fold."""

    fold_index: int
    interior: tuple[frozenset[str], ...]
    exterior: tuple[frozenset[str], ...]


@dataclass(frozen=True)
class FoldSplit:
    """One fold's training mixtures plus its validation strata.

    ``strata`` is keyed by the exterior count ``m`` (single-collection
    case) or by a slot bitmask (ordered case, bit i set means slot i draws
    from its exterior). Strata may be empty on incomplete datasets; they
    are still present in the map.
    """

    fold_index: int
    training: FoldKeys
    strata: dict[int, FoldKeys]


def partition_collection(member_ids, k: int, seed: int) -> list[list[str]]:
    """Shuffle members with ``seed`` and cut them into k balanced blocks.

    Block sizes differ by at most one; the first ``len(member_ids) % k``
    blocks take the extra member.
    """
    members = list(member_ids)
    if k < 2:
        raise ValueError("need at least 2 folds")
    if k > len(members):
        raise TooManyFolds(f"{k} folds over {len(members)} members")
    rng = np.random.default_rng(seed)
    shuffled = [members[i] for i in rng.permutation(len(members))]
    base, extra = divmod(len(members), k)
    blocks, start = [], 0
    for j in range(k):
        size = base + (1 if j < extra else 0)
        blocks.append(shuffled[start:start + size])
        start += size
    return blocks


def make_fold_partitions(dataset: Dataset, k: int, seed: int) -> list[FoldPartition]:
    """Build the k fold partitions used by one cross-validation run.

    Every collection is partitioned independently (with a seed derived per
    collection); fold j takes the j-th block of each collection as its
    interior.
    """
    per_collection = []
    for ci, spec in enumerate(dataset.collections):
        sub_seed = int(np.random.SeedSequence([seed, ci]).generate_state(1)[0])
        per_collection.append(partition_collection(spec.members, k, sub_seed))
    partitions = []
    for j in range(k):
        interior = tuple(frozenset(blocks[j]) for blocks in per_collection)
        exterior = tuple(
            frozenset(spec.members) - frozenset(blocks[j])
            for spec, blocks in zip(dataset.collections, per_collection)
        )
        partitions.append(FoldPartition(j, interior, exterior))
    return partitions


def _check_partition(dataset: Dataset, partition: FoldPartition):
    if len(partition.interior) != len(dataset.collections):
        raise PartitionMismatch("partition and dataset disagree on collections")
    for spec, inside, outside in zip(dataset.collections, partition.interior,
                                     partition.exterior):
        if inside & outside:
            raise PartitionMismatch(
                f"interior and exterior of {spec.name!r} overlap")
        if inside | outside != frozenset(spec.members):
            raise PartitionMismatch(
                f"partition does not cover collection {spec.name!r}")


def build_fold(dataset: Dataset, partition: FoldPartition) -> FoldSplit:
    """Split a single-collection unordered dataset by exterior count.

    Training keeps the mixtures built entirely from the interior block (on
    a complete dataset that is ``choose(|interior|, N)`` of them); stratum
    ``m`` collects the mixtures with exactly m exterior constituents.
    """
    if dataset.ordered or len(dataset.collections) != 1:
        raise ValueError("build_fold needs a single-collection unordered dataset")
    _check_partition(dataset, partition)
    exterior = partition.exterior[0]
    training = []
    strata: dict[int, list[MixtureKey]] = {m: [] for m in range(1, dataset.arity + 1)}
    for key in dataset.records:
        out = sum(c.local_id in exterior for c in key.constituents)
        if out == 0:
            training.append(key)
        else:
            strata[out].append(key)
    return FoldSplit(partition.fold_index, frozenset(training),
                     {m: frozenset(keys) for m, keys in strata.items()})


def build_fractured_fold(dataset: Dataset, partition: FoldPartition) -> FoldSplit:
    """Split an ordered dataset into the 2**N - 1 exterior-mask strata.

    Training is the product of all interiors intersected with the records;
    the stratum for mask S holds the mixtures whose slot i draws from its
    exterior exactly when bit i of S is set.
    """
    if not dataset.ordered:
        raise ValueError("build_fractured_fold needs an ordered dataset")
    _check_partition(dataset, partition)
    n = dataset.arity
    training = []
    strata: dict[int, list[MixtureKey]] = {mask: [] for mask in range(1, 2 ** n)}
    for key in dataset.records:
        mask = 0
        for slot, c in enumerate(key.constituents):
            if c.local_id in partition.exterior[slot]:
                mask |= 1 << slot
        if mask == 0:
            training.append(key)
        else:
            strata[mask].append(key)
    return FoldSplit(partition.fold_index, frozenset(training),
                     {mask: frozenset(keys) for mask, keys in strata.items()})


def standard_split(dataset: Dataset, k: int, seed: int) -> list[tuple[FoldKeys, FoldKeys]]:
    """Conventional k-fold split over mixtures, ignoring shared constituents.

    Returns k (training, validation) pairs; the validation folds are
    disjoint, cover every record, and differ in size by at most one.
    """
    keys = dataset.sorted_keys()
    if k < 2:
        raise ValueError("need at least 2 folds")
    if k > len(keys):
        raise TooManyFolds(f"{k} folds over {len(keys)} records")
    rng = np.random.default_rng(seed)
    shuffled = [keys[i] for i in rng.permutation(len(keys))]
    base, extra = divmod(len(keys), k)
    folds, start = [], 0
    for j in range(k):
        size = base + (1 if j < extra else 0)
        held_out = frozenset(shuffled[start:start + size])
        folds.append((frozenset(keys) - held_out, held_out))
        start += size
    return folds


def mask_label(mask: int, arity: int) -> str:
    """Render an exterior mask as a slot-flag string ('1' = exterior slot)."""
    return "".join("1" if (mask >> i) & 1 else "0" for i in range(arity))
