"""Experiment orchestration: strategy x descriptor-mode x fold.

One run evaluates every requested validation strategy against every
descriptor mode over k folds, all derived deterministically from a single
master seed:

* strategies: "standard" (plain k-fold over mixtures), "compounds-out"
  (interior-product training, strata by exterior count), "fractured"
  (ordered datasets, strata by exterior slot mask);
* descriptor modes: "real" (measured descriptors), "pseudo" (random
  per-constituent vectors regenerated per fold), "y-randomized" (real
  descriptors, training labels permuted).

All modes of a given (strategy, fold) share the identical training and
stratum key sets: the modes differ only in features or training labels.
One interior partition per fold is shared by compounds-out and fractured.
Seeds for every random choice are derived from the master seed by name,
never by position, so adding a mode or strategy never shifts the
randomness of the others.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field, replace

import numpy as np

from .core import Dataset
from .descriptors import (
    CombinerPolicy,
    DescriptorTable,
    combine_matrix,
    constituent_pool,
    gen_pseudodescriptors,
    y_randomize,
)
from .errors import ConfigError, SingleClassValidation
from .folds import build_fold, build_fractured_fold, make_fold_partitions, mask_label, standard_split
from .io import load_descriptor_csv, load_mixture_csv
from .learner import LearnerParams, fit, predict_score
from .metrics import FoldMetric, accuracy, aggregate, auc_roc
from .report import AggregateCell, Report, SkipRecord, aggregate_sort_key, cell_sort_key
from .simulate import SimConfig, SimResult, informative_descriptors, simulate

STRATEGIES = ("standard", "compounds-out", "fractured")
MODES = ("real", "pseudo", "y-randomized")
METRICS = ("auc_roc", "accuracy")


@dataclass(frozen=True)
class FileSource:
    """Dataset read from CSV files. ``descriptors`` is required for the
    real and y-randomized modes."""

    mixtures: str
    descriptors: str | None = None
    ordered: bool = False


@dataclass(frozen=True)
class ExperimentConfig:
    source: SimConfig | FileSource = field(default_factory=SimConfig)
    k: int = 5
    strategies: tuple[str, ...] = ("standard", "compounds-out")
    descriptor_modes: tuple[str, ...] = ("pseudo",)
    metrics: tuple[str, ...] = ("accuracy",)
    combiner: CombinerPolicy = CombinerPolicy("sum-range")
    learner: LearnerParams = field(default_factory=LearnerParams)
    seed: int = 0
    output: str | None = None
    pseudo_length: int | None = None
    informative_noise_std: float = 1.0

    def __post_init__(self):
        if self.k < 2:
            raise ConfigError("k must be >= 2")
        _check_subset("strategy", self.strategies, STRATEGIES)
        _check_subset("descriptor mode", self.descriptor_modes, MODES)
        _check_subset("metric", self.metrics, METRICS)
        if self.pseudo_length is not None and self.pseudo_length < 1:
            raise ConfigError("pseudo_length must be >= 1")
        needs_table = {"real", "y-randomized"} & set(self.descriptor_modes)
        if (needs_table and isinstance(self.source, FileSource)
                and self.source.descriptors is None):
            raise ConfigError(
                f"{sorted(needs_table)} modes need a descriptor file")


def _check_subset(what, chosen, allowed):
    if not chosen:
        raise ConfigError(f"need at least one {what}")
    if len(set(chosen)) != len(chosen):
        raise ConfigError(f"duplicate {what} in {chosen}")
    for name in chosen:
        if name not in allowed:
            raise ConfigError(f"unknown {what} {name!r} (allowed: {allowed})")


def derive_seed(master: int, *tags) -> int:
    """A child seed addressed by name. Tag hashing keeps derived streams
    independent of the order or number of other derivations."""
    entropy = [master] + [zlib.crc32(repr(t).encode()) for t in tags]
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])


def _binary_labels(dataset: Dataset) -> dict:
    """Record labels as 0/1; continuous labels are active when > 0."""
    if dataset.label_kind == "binary":
        return {key: int(v) for key, v in dataset.records.items()}
    return {key: (1 if v > 0 else 0) for key, v in dataset.records.items()}


def load_source(config: ExperimentConfig):
    """Returns (dataset, base_table, sim_result). base_table is the
    measured-descriptor stand-in used by y-randomized mode (and real mode
    on file sources); may be None when no mode needs it."""
    if isinstance(config.source, SimConfig):
        result = simulate(config.source)
        return result.dataset, result.descriptors, result
    dataset = load_mixture_csv(config.source.mixtures,
                               ordered=config.source.ordered)
    table = None
    if config.source.descriptors is not None:
        table = load_descriptor_csv(config.source.descriptors)
        table.check_covers(dataset)
    return dataset, table, None


def _check_strategy_fit(dataset: Dataset, strategies) -> None:
    single = (not dataset.ordered) and len(dataset.collections) == 1
    for strategy in strategies:
        if strategy == "compounds-out" and not single:
            raise ConfigError(
                "compounds-out needs an unordered single-collection dataset")
        if strategy == "fractured" and not dataset.ordered:
            raise ConfigError("fractured needs an ordered dataset")


def _strategy_folds(dataset: Dataset, strategy: str, k: int, master: int):
    """Yield (fold_index, training keys, {stratum label: keys})."""
    if strategy == "standard":
        folds = standard_split(dataset, k, derive_seed(master, "standard-split"))
        return [(j, training, {"all": validation})
                for j, (training, validation) in enumerate(folds)]
    partitions = make_fold_partitions(dataset, k, derive_seed(master, "partition"))
    out = []
    for part in partitions:
        if strategy == "compounds-out":
            split = build_fold(dataset, part)
            strata = {str(m): keys for m, keys in split.strata.items()}
        else:
            split = build_fractured_fold(dataset, part)
            strata = {mask_label(mask, dataset.arity): keys
                      for mask, keys in split.strata.items()}
        out.append((part.fold_index, split.training, strata))
    return out


def run_experiment(config: ExperimentConfig) -> Report:
    """Run the full grid and assemble the report.

    Every (strategy, stratum, mode, fold, metric) combination appears in
    the result exactly once: as a FoldMetric when scored, as a SkipRecord
    when the stratum was empty, training was empty, or AUC was undefined.
    """
    dataset, base_table, sim_result = load_source(config)
    _check_strategy_fit(dataset, config.strategies)
    labels = _binary_labels(dataset)
    master = config.seed

    real_table = _real_table(config, base_table, sim_result, dataset)
    pseudo_len = config.pseudo_length
    if pseudo_len is None:
        pseudo_len = base_table.length if base_table is not None else 128

    pool = constituent_pool(dataset)
    pseudo_tables = {}
    if "pseudo" in config.descriptor_modes:
        pseudo_tables = {
            j: gen_pseudodescriptors(pool, pseudo_len,
                                     derive_seed(master, "pseudo-table", j))
            for j in range(config.k)
        }

    cells: list[FoldMetric] = []
    skips: list[SkipRecord] = []
    for strategy in config.strategies:
        for fold_index, training, strata in _strategy_folds(
                dataset, strategy, config.k, master):
            train_keys = sorted(training)
            y_train_true = np.array([labels[key] for key in train_keys],
                                    dtype=np.int64)
            for mode in config.descriptor_modes:
                if mode == "real":
                    table = real_table
                elif mode == "pseudo":
                    table = pseudo_tables[fold_index]
                else:
                    table = base_table
                _evaluate_cell(config, strategy, fold_index, mode, table,
                               train_keys, y_train_true, strata, labels,
                               cells, skips)

    by_group: dict[tuple, list[FoldMetric]] = {}
    for cell in sorted(cells, key=cell_sort_key):
        by_group.setdefault(
            (cell.strategy, cell.mode, cell.stratum, cell.metric), []).append(cell)
    aggregates = []
    for (strategy, mode, stratum, metric), group in by_group.items():
        mean, std = aggregate([c.value for c in group])
        aggregates.append(AggregateCell(strategy=strategy, mode=mode,
                                        stratum=stratum, metric=metric,
                                        mean=mean, std=std, n_folds=len(group)))
    return Report(
        config=config_echo(config),
        cells=tuple(sorted(cells, key=cell_sort_key)),
        skips=tuple(sorted(skips, key=cell_sort_key)),
        aggregates=tuple(sorted(aggregates, key=aggregate_sort_key)),
    )


def _real_table(config, base_table, sim_result: SimResult | None,
                dataset: Dataset) -> DescriptorTable | None:
    if "real" not in config.descriptor_modes:
        return None
    if sim_result is not None:
        return informative_descriptors(
            sim_result, base_table.length,
            derive_seed(config.seed, "informative"),
            noise_std=config.informative_noise_std)
    return base_table


def _evaluate_cell(config, strategy, fold_index, mode, table, train_keys,
                   y_train_true, strata, labels, cells, skips):
    stratum_labels = sorted(strata)

    def skip_all(reason):
        for stratum in stratum_labels:
            for metric in config.metrics:
                skips.append(SkipRecord(strategy=strategy, mode=mode,
                                        stratum=stratum, fold_index=fold_index,
                                        metric=metric, reason=reason))

    if not train_keys:
        skip_all("empty training set")
        return
    X_train = combine_matrix(train_keys, table, config.combiner)
    if mode == "y-randomized":
        y_train = y_randomize(
            y_train_true, derive_seed(config.seed, "yperm", strategy, fold_index))
    else:
        y_train = y_train_true
    params = replace(config.learner,
                     seed=derive_seed(config.seed, "forest", strategy, mode,
                                      fold_index))
    model = fit(X_train, y_train, params)

    for stratum in stratum_labels:
        val_keys = sorted(strata[stratum])
        if not val_keys:
            for metric in config.metrics:
                skips.append(SkipRecord(strategy=strategy, mode=mode,
                                        stratum=stratum, fold_index=fold_index,
                                        metric=metric, reason="empty stratum"))
            continue
        X_val = combine_matrix(val_keys, table, config.combiner)
        y_val = np.array([labels[key] for key in val_keys], dtype=np.int64)
        scores = predict_score(model, X_val)
        for metric in config.metrics:
            if metric == "auc_roc":
                try:
                    value = auc_roc(scores, y_val)
                except SingleClassValidation:
                    skips.append(SkipRecord(strategy=strategy, mode=mode,
                                            stratum=stratum,
                                            fold_index=fold_index,
                                            metric=metric,
                                            reason="single-class stratum"))
                    continue
            else:
                value = accuracy((scores >= 0.5).astype(np.int64), y_val)
            cells.append(FoldMetric(strategy=strategy, mode=mode,
                                    stratum=stratum, fold_index=fold_index,
                                    metric=metric, value=value,
                                    n_validation=len(val_keys)))


def config_echo(config: ExperimentConfig) -> dict:
    """The config as a JSON-friendly dict, echoed into every report."""
    if isinstance(config.source, SimConfig):
        source = {
            "type": "simulate",
            "n_drugs": config.source.n_drugs,
            "arity": config.source.arity,
            "noise_variance": config.source.noise_variance,
            "noise_std": config.source.noise_std,
            "fingerprint_length": config.source.fingerprint_length,
            "seed": config.source.seed,
        }
    else:
        source = {
            "type": "files",
            "mixtures": config.source.mixtures,
            "descriptors": config.source.descriptors,
            "ordered": config.source.ordered,
        }
    return {
        "source": source,
        "k": config.k,
        "strategies": list(config.strategies),
        "descriptor_modes": list(config.descriptor_modes),
        "metrics": list(config.metrics),
        "combiner": config.combiner.variant,
        "learner": {
            "n_trees": config.learner.n_trees,
            "max_depth": config.learner.max_depth,
            "min_leaf": config.learner.min_leaf,
            "features_per_split": config.learner.features_per_split,
        },
        "seed": config.seed,
        "output": config.output,
        "pseudo_length": config.pseudo_length,
        "informative_noise_std": config.informative_noise_std,
    }


def parse_config_text(text: str) -> dict[str, str]:
    """Flat ``key = value`` lines; # comments and blanks ignored; last
    occurrence of a repeated key wins."""
    items: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, _, value = line.partition("=")
        items[key.strip()] = value.strip()
    return items


def parse_config_file(path) -> dict[str, str]:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config_text(fh.read())
    except OSError as exc:
        raise ConfigError(str(exc)) from exc


_NONE_TEXTS = ("", "none", "null")


def config_from_items(items: dict[str, str]) -> ExperimentConfig:
    """Build an ExperimentConfig from flat string settings (config file
    plus command-line overrides). Unknown keys are rejected."""
    work = dict(items)

    def take(key, default=None):
        return work.pop(key, default)

    def take_int(key, default):
        text = take(key)
        if text is None:
            return default
        try:
            return int(text)
        except ValueError:
            raise ConfigError(f"{key} must be an integer, got {text!r}") from None

    def take_float(key, default, none_ok=False):
        text = take(key)
        if text is None:
            return default
        if none_ok and text.lower() in _NONE_TEXTS:
            return None
        try:
            return float(text)
        except ValueError:
            raise ConfigError(f"{key} must be a number, got {text!r}") from None

    def take_bool(key, default):
        text = take(key)
        if text is None:
            return default
        lower = text.lower()
        if lower in ("1", "true", "yes", "on"):
            return True
        if lower in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{key} must be a boolean, got {text!r}")

    def take_list(key, default):
        text = take(key)
        if text is None:
            return default
        chosen = tuple(part.strip() for part in text.split(",") if part.strip())
        if not chosen:
            raise ConfigError(f"{key} must name at least one entry")
        return chosen

    seed = take_int("seed", 0)
    k = take_int("k", 5)
    source_kind = take("source", "sim")
    if source_kind in ("sim", "simulate"):
        sim_seed_text = take("sim.seed")
        if sim_seed_text is None:
            # unseeded simulations still derive from the master seed so a
            # report stays a pure function of the config file
            sim_seed = derive_seed(seed, "sim-data")
        else:
            try:
                sim_seed = int(sim_seed_text)
            except ValueError:
                raise ConfigError(
                    f"sim.seed must be an integer, got {sim_seed_text!r}") from None
        source: SimConfig | FileSource = SimConfig(
            n_drugs=take_int("sim.n_drugs", 32),
            arity=take_int("sim.arity", 3),
            noise_variance=take_float("sim.noise_variance", 0.5),
            noise_std=take_float("sim.noise_std", None, none_ok=True),
            fingerprint_length=take_int("sim.fingerprint_length", 128),
            seed=sim_seed,
        )
    elif source_kind == "files":
        mixtures = take("mixtures")
        if not mixtures:
            raise ConfigError("files source needs mixtures = <path>")
        descriptors = take("descriptors")
        if descriptors is not None and descriptors.lower() in _NONE_TEXTS:
            descriptors = None
        source = FileSource(mixtures=mixtures, descriptors=descriptors,
                            ordered=take_bool("ordered", False))
    else:
        raise ConfigError(f"unknown source {source_kind!r} (sim or files)")

    depth_text = take("learner.max_depth")
    if depth_text is None or depth_text.lower() in _NONE_TEXTS:
        max_depth = None
    else:
        try:
            max_depth = int(depth_text)
        except ValueError:
            raise ConfigError(
                f"learner.max_depth must be an integer or none, got {depth_text!r}"
            ) from None
    fps_text = take("learner.features_per_split", "sqrt")
    if fps_text == "sqrt":
        features_per_split: int | str = "sqrt"
    else:
        try:
            features_per_split = int(fps_text)
        except ValueError:
            raise ConfigError(
                "learner.features_per_split must be 'sqrt' or an integer, "
                f"got {fps_text!r}") from None
    try:
        learner = LearnerParams(
            n_trees=take_int("learner.n_trees", 100),
            max_depth=max_depth,
            min_leaf=take_int("learner.min_leaf", 1),
            features_per_split=features_per_split,
            seed=take_int("learner.seed", 0),
        )
        combiner = CombinerPolicy(take("combiner", "sum-range"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    pseudo_text = take("pseudo_length")
    if pseudo_text is None or pseudo_text.lower() in _NONE_TEXTS:
        pseudo_length = None
    else:
        try:
            pseudo_length = int(pseudo_text)
        except ValueError:
            raise ConfigError(
                f"pseudo_length must be an integer or none, got {pseudo_text!r}"
            ) from None

    strategies = take_list("strategies", ("standard", "compounds-out"))
    modes = take_list("modes", ("pseudo",))
    metrics = take_list("metrics", ("accuracy",))
    informative_noise_std = take_float("informative_noise_std", 1.0)
    output = take("output")

    if work:
        raise ConfigError(f"unknown config keys: {sorted(work)}")
    return ExperimentConfig(
        source=source, k=k, strategies=strategies, descriptor_modes=modes,
        metrics=metrics, combiner=combiner, learner=learner, seed=seed,
        output=output, pseudo_length=pseudo_length,
        informative_noise_std=informative_noise_std,
    )


def split_rows(dataset: Dataset, strategy: str, k: int, master: int):
    """Fold membership rows (key, fold, role, stratum) exactly as
    run_experiment would use them, for the `split` subcommand."""
    from .io import key_text

    _check_strategy_fit(dataset, [strategy])
    rows = []
    for fold_index, training, strata in _strategy_folds(dataset, strategy, k,
                                                        master):
        for key in sorted(training):
            rows.append((key_text(key), fold_index, "training", ""))
        for stratum in sorted(strata):
            for key in sorted(strata[stratum]):
                rows.append((key_text(key), fold_index, "validation", stratum))
    return rows
