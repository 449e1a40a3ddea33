"""Data model for N-ary mixture datasets.

A mixture is an element of the Cartesian product of one or more constituent
collections. Two flavors exist:

* ``ordered``: each of the N slots draws from its own collection (for
  example protein x ligand, or drug x drug x concentration level). Slot
  position is meaningful, so the tuple is kept as given.
* ``unordered``: all N constituents come from one collection and the tuple
  carries no order. Keys are canonicalized by sorting constituents on their
  id, and repeated constituents are rejected, so an unordered dataset is a
  set of N-subsets rather than N-tuples.

Everything here is an immutable value type; the functions are pure.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .errors import (
    ArityMismatch,
    DuplicateConstituent,
    DuplicateMixture,
    InsufficientMembers,
    MixedLabelKinds,
    UnknownConstituent,
)

LABEL_KINDS = ("binary", "continuous")


@dataclass(frozen=True, order=True)
class ConstituentId:
    """One atomic member of a mixture, addressed by collection and local id."""

    collection_index: int
    local_id: str


@dataclass(frozen=True)
class CollectionSpec:
    """A named collection of constituent ids (no duplicates)."""

    name: str
    members: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if any(not m for m in self.members):
            raise ValueError(f"collection {self.name!r} contains an empty id")
        if len(set(self.members)) != len(self.members):
            raise ValueError(f"collection {self.name!r} contains duplicate ids")


@dataclass(frozen=True, order=True)
class MixtureKey:
    """Canonical identity of one mixture: a tuple of N constituents."""

    constituents: tuple[ConstituentId, ...]

    @property
    def local_ids(self) -> tuple[str, ...]:
        return tuple(c.local_id for c in self.constituents)

    def __len__(self) -> int:
        return len(self.constituents)


@dataclass(frozen=True)
class Dataset:
    """Labeled mixtures over declared constituent collections.

    ``records`` maps canonical keys to labels. Binary labels are stored as
    0/1 integers, continuous labels as floats; ``label_kind`` says which.
    """

    collections: tuple[CollectionSpec, ...]
    arity: int
    ordered: bool
    records: Mapping[MixtureKey, float]
    label_kind: str

    def sorted_keys(self) -> list[MixtureKey]:
        return sorted(self.records)

    def members_of(self, index: int) -> tuple[str, ...]:
        return self.collections[index].members


def canonical_key(constituents: Sequence[ConstituentId], ordered: bool,
                  arity: int | None = None) -> MixtureKey:
    """Canonicalize a constituent tuple into a :class:`MixtureKey`.

    Ordered mixtures pass through unchanged. Unordered mixtures are sorted
    by local id, which makes the function idempotent and invariant under
    permutation of the input; a repeated constituent raises
    :class:`DuplicateConstituent` because self-mixtures are excluded.
    """
    constituents = tuple(constituents)
    if arity is not None and len(constituents) != arity:
        raise ArityMismatch(
            f"expected {arity} constituents, got {len(constituents)}")
    if ordered:
        return MixtureKey(constituents)
    if len({c.collection_index for c in constituents}) > 1:
        raise ValueError("unordered mixtures draw from a single collection")
    ranked = sorted(constituents, key=lambda c: c.local_id)
    for a, b in zip(ranked, ranked[1:]):
        if a.local_id == b.local_id:
            raise DuplicateConstituent(
                f"constituent {a.local_id!r} appears more than once")
    return MixtureKey(tuple(ranked))


def enumerate_complete(collections: Sequence[CollectionSpec], arity: int,
                       ordered: bool) -> list[MixtureKey]:
    """Enumerate every mixture the declared collections can form.

    Ordered mode yields the full Cartesian product (one slot per
    collection); unordered mode yields all N-subsets of the single
    collection. The result is duplicate-free and sorted canonically.
    """
    if ordered:
        if len(collections) != arity:
            raise ArityMismatch(
                f"ordered mode needs {arity} collections, got {len(collections)}")
        pools = [
            sorted(ConstituentId(i, m) for m in spec.members)
            for i, spec in enumerate(collections)
        ]
        return sorted(MixtureKey(combo) for combo in itertools.product(*pools))
    if len(collections) != 1:
        raise ValueError("unordered mode takes exactly one collection")
    members = sorted(collections[0].members)
    if len(members) < arity:
        raise InsufficientMembers(
            f"collection has {len(members)} members, arity is {arity}")
    return [
        MixtureKey(tuple(ConstituentId(0, m) for m in combo))
        for combo in itertools.combinations(members, arity)
    ]


def _resolve_row(row: Sequence, collections: Sequence[CollectionSpec],
                 ordered: bool, arity: int) -> tuple[ConstituentId, ...]:
    if len(row) != arity:
        raise ArityMismatch(f"expected {arity} constituents, got {len(row)}")
    out = []
    for slot, item in enumerate(row):
        if isinstance(item, ConstituentId):
            cid = item
        else:
            cid = ConstituentId(slot if ordered else 0, str(item))
        spec = collections[cid.collection_index]
        if cid.local_id not in spec.members:
            raise UnknownConstituent(
                f"id {cid.local_id!r} is not in collection {spec.name!r}")
        out.append(cid)
    return tuple(out)


def _check_label(label, kind: str):
    if kind == "binary":
        if label in (0, 1, 0.0, 1.0, False, True):
            return int(label)
        raise MixedLabelKinds(f"label {label!r} is not binary")
    try:
        return float(label)
    except (TypeError, ValueError):
        raise MixedLabelKinds(f"label {label!r} is not numeric") from None


def build_dataset(collections: Sequence[CollectionSpec], arity: int,
                  ordered: bool,
                  labeled_rows: Iterable[tuple[Sequence, object]],
                  label_kind: str = "binary") -> Dataset:
    """Assemble a :class:`Dataset` from labeled constituent tuples.

    Rows may name constituents by plain local id (resolved positionally in
    ordered mode, against the single collection otherwise) or by explicit
    :class:`ConstituentId`. Keys are canonicalized on insertion and
    collisions are rejected, so ``(d1, d2)`` and ``(d2, d1)`` cannot both
    enter an unordered dataset.
    """
    if label_kind not in LABEL_KINDS:
        raise ValueError(f"label_kind must be one of {LABEL_KINDS}")
    if arity < 2:
        raise ArityMismatch("mixtures need arity >= 2")
    collections = tuple(collections)
    if ordered and len(collections) != arity:
        raise ArityMismatch(
            f"ordered mode needs {arity} collections, got {len(collections)}")
    if not ordered and len(collections) != 1:
        raise ValueError("unordered mode takes exactly one collection")

    records: dict[MixtureKey, float] = {}
    for row, label in labeled_rows:
        key = canonical_key(_resolve_row(row, collections, ordered, arity),
                            ordered, arity)
        if key in records:
            raise DuplicateMixture(f"mixture {key.local_ids} appears twice")
        records[key] = _check_label(label, label_kind)
    return Dataset(collections, arity, ordered,
                   MappingProxyType(records), label_kind)
