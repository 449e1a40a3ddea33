"""Experiment reports: structure, serialization, pretty-printing.

A report is a pure function of the experiment config, so serialization is
deliberately canonical: fixed key order, fixed cell ordering, repr-exact
floats. Two runs of the same config produce byte-identical files.

``write_report`` emits the nested JSON document plus a flat CSV of metric
cells (same path with a .csv suffix) for spreadsheet use.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import asdict, dataclass

from .metrics import FoldMetric


@dataclass(frozen=True)
class SkipRecord:
    """A (strategy, mode, stratum, fold, metric) cell that could not be
    scored, with the reason (empty stratum, single-class stratum, ...)."""

    strategy: str
    mode: str
    stratum: str
    fold_index: int
    metric: str
    reason: str


@dataclass(frozen=True)
class AggregateCell:
    """Across-fold mean and sample std of one metric in one stratum."""

    strategy: str
    mode: str
    stratum: str
    metric: str
    mean: float
    std: float
    n_folds: int


@dataclass(frozen=True)
class Report:
    config: dict
    cells: tuple[FoldMetric, ...]
    skips: tuple[SkipRecord, ...]
    aggregates: tuple[AggregateCell, ...]


def stratum_sort_key(label: str):
    """Order strata: "all" first, then compounds-out counts, then slot
    masks by (number of exterior slots, mask)."""
    if label == "all":
        return (0, 0, "")
    if len(label) == 1:
        return (1, int(label), label)
    return (1, sum(ch == "1" for ch in label), label)


def cell_sort_key(cell):
    return (cell.strategy, cell.mode, stratum_sort_key(cell.stratum),
            cell.fold_index, cell.metric)


def aggregate_sort_key(agg: AggregateCell):
    return (agg.strategy, agg.mode, agg.metric, stratum_sort_key(agg.stratum))


def csv_path_for(path) -> str:
    """The flat-CSV companion path of a report path."""
    path = os.fspath(path)
    if path.endswith(".json"):
        return path[: -len(".json")] + ".csv"
    return path + ".csv"


_CSV_COLUMNS = ("strategy", "mode", "stratum", "fold_index", "metric",
                "value", "n_validation")


def write_report(report: Report, path: str) -> None:
    """Write the JSON document and its flat CSV companion."""
    doc = {
        "config": report.config,
        "aggregates": [
            {**asdict(a), "summary": f"{a.mean:.4f} ± {a.std:.4f}"}
            for a in report.aggregates
        ],
        "cells": [asdict(c) for c in report.cells],
        "skips": [asdict(s) for s in report.skips],
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2, allow_nan=False)
        fh.write("\n")
    with open(csv_path_for(path), "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_CSV_COLUMNS)
        for c in report.cells:
            writer.writerow([c.strategy, c.mode, c.stratum, c.fold_index,
                             c.metric, repr(c.value), c.n_validation])


def read_report(path: str) -> Report:
    """Parse a report written by ``write_report``; exact round trip."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    cells = tuple(FoldMetric(**c) for c in doc["cells"])
    skips = tuple(SkipRecord(**s) for s in doc["skips"])
    aggregates = tuple(
        AggregateCell(**{k: v for k, v in a.items() if k != "summary"})
        for a in doc["aggregates"]
    )
    return Report(config=doc["config"], cells=cells, skips=skips,
                  aggregates=aggregates)


def format_report(report: Report) -> str:
    """Human-readable summary: aggregates grouped by strategy and mode,
    followed by any skips."""
    lines = []
    lines.append("config:")
    for key, value in report.config.items():
        lines.append(f"  {key} = {value}")
    current = None
    for agg in report.aggregates:
        head = (agg.strategy, agg.mode, agg.metric)
        if head != current:
            current = head
            lines.append("")
            lines.append(f"{agg.strategy} / {agg.mode} / {agg.metric}:")
        lines.append(
            f"  stratum {agg.stratum:>4}: {agg.mean:.4f} ± {agg.std:.4f}"
            f"  (n={agg.n_folds})")
    if report.skips:
        lines.append("")
        lines.append("skipped:")
        for s in report.skips:
            lines.append(
                f"  {s.strategy} / {s.mode} / stratum {s.stratum} / fold"
                f" {s.fold_index} / {s.metric}: {s.reason}")
    return "\n".join(lines) + "\n"
