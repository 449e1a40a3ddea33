"""CSV ingestion and emission for mixture datasets and descriptor tables.

Mixture CSV: header ``constituent_1,...,constituent_N,label``, one mixture
per row. Labels must be all "0"/"1" (binary) or all decimal (continuous;
thresholded at 0 downstream). Descriptor CSV: header ``id,f_0,...,f_{L-1}``,
one constituent per row, numeric cells.
"""

from __future__ import annotations

import csv

import numpy as np

from .core import CollectionSpec, ConstituentId, Dataset, MixtureKey, build_dataset, canonical_key
from .descriptors import DescriptorTable
from .errors import DuplicateMixture, MixvalError, ParseError, RaggedRows


def _read_rows(path) -> list[list[str]]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            return [row for row in csv.reader(fh)]
    except OSError as exc:
        raise ParseError(str(exc)) from exc


def load_mixture_csv(path, ordered: bool = False) -> Dataset:
    """Read a mixture CSV into a Dataset.

    Collections are inferred from the rows: one pooled collection when
    unordered, one per slot when ordered. Errors carry 1-based line
    numbers (header is line 1).
    """
    rows = _read_rows(path)
    if not rows:
        raise ParseError("empty file", line=1)
    header = rows[0]
    if len(header) < 3 or header[-1] != "label":
        raise ParseError("expected header constituent_1,...,constituent_N,label",
                         line=1)
    arity = len(header) - 1
    expected = [f"constituent_{i + 1}" for i in range(arity)]
    if header[:-1] != expected:
        raise ParseError("expected header constituent_1,...,constituent_N,label",
                         line=1)
    if not rows[1:]:
        raise ParseError("no data rows", line=1)

    raw: list[tuple[tuple[str, ...], str]] = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != arity + 1:
            raise ParseError(f"expected {arity + 1} fields, got {len(row)}",
                             line=lineno)
        raw.append((tuple(row[:-1]), row[-1]))

    label_texts = [text for _, text in raw]
    if all(text in ("0", "1") for text in label_texts):
        label_kind = "binary"
        labels: list = [int(text) for text in label_texts]
    else:
        label_kind = "continuous"
        labels = []
        for lineno, text in zip(range(2, 2 + len(label_texts)), label_texts):
            try:
                labels.append(float(text))
            except ValueError:
                raise ParseError(f"bad label {text!r}", line=lineno) from None

    if ordered:
        pools = [sorted({ids[i] for ids, _ in raw}) for i in range(arity)]
        collections = tuple(
            CollectionSpec(name=f"slot_{i + 1}", members=tuple(pool))
            for i, pool in enumerate(pools))
    else:
        pool = sorted({cid for ids, _ in raw for cid in ids})
        collections = (CollectionSpec(name="constituents", members=tuple(pool)),)

    # canonicalize per row so structural errors carry their line number
    seen: dict[MixtureKey, int] = {}
    for lineno, (ids, _) in enumerate(raw, start=2):
        cids = _row_constituents(ids, ordered)
        try:
            key = canonical_key(cids, ordered=ordered, arity=arity)
        except MixvalError as exc:
            raise type(exc)(f"line {lineno}: {exc}") from None
        if key in seen:
            raise DuplicateMixture(
                f"line {lineno}: duplicate of line {seen[key]}")
        seen[key] = lineno

    labeled_rows = [(ids, label) for (ids, _), label in zip(raw, labels)]
    return build_dataset(collections, arity, ordered, labeled_rows,
                         label_kind=label_kind)


def _row_constituents(ids, ordered):
    if ordered:
        return tuple(ConstituentId(i, cid) for i, cid in enumerate(ids))
    return tuple(ConstituentId(0, cid) for cid in ids)


def write_mixture_csv(dataset: Dataset, path) -> None:
    """Inverse of load_mixture_csv (rows in canonical key order)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"constituent_{i + 1}" for i in range(dataset.arity)]
                        + ["label"])
        for key in dataset.sorted_keys():
            label = dataset.records[key]
            text = str(label) if dataset.label_kind == "binary" else repr(float(label))
            writer.writerow(list(key.local_ids) + [text])


def load_descriptor_csv(path) -> DescriptorTable:
    """Read a descriptor CSV into a table of kind "real"."""
    rows = _read_rows(path)
    if not rows:
        raise ParseError("empty file", line=1)
    header = rows[0]
    if len(header) < 2 or header[0] != "id":
        raise ParseError("expected header id,f_0,...,f_{L-1}", line=1)
    length = len(header) - 1
    if not rows[1:]:
        raise ParseError("no data rows", line=1)
    vectors: dict[str, np.ndarray] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != length + 1:
            raise RaggedRows(
                f"line {lineno}: expected {length + 1} fields, got {len(row)}")
        if row[0] in vectors:
            raise ParseError(f"duplicate id {row[0]!r}", line=lineno)
        try:
            vec = np.array([float(cell) for cell in row[1:]], dtype=np.float64)
        except ValueError:
            raise ParseError("non-numeric descriptor cell", line=lineno) from None
        vec.flags.writeable = False
        vectors[row[0]] = vec
    return DescriptorTable(length=length, kind="real", vectors=vectors)


def write_descriptor_csv(table: DescriptorTable, path) -> None:
    """Inverse of load_descriptor_csv (rows sorted by id)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id"] + [f"f_{i}" for i in range(table.length)])
        for local_id in sorted(table.vectors):
            vec = table.vectors[local_id]
            writer.writerow([local_id] + [repr(float(v)) for v in vec])


def write_split_csv(rows, path) -> None:
    """Fold membership listing: key, fold, role, stratum per row."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["key", "fold", "role", "stratum"])
        for key, fold, role, stratum in rows:
            writer.writerow([key, fold, role, stratum])


def key_text(key: MixtureKey) -> str:
    """Render a mixture key for split listings: ids joined with '+'."""
    return "+".join(key.local_ids)
