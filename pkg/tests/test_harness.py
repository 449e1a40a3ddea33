"""Experiment orchestration: grids, seed derivation, config parsing."""

import numpy as np
import pytest

from helpers import complete_unordered
from mixval.core import build_dataset
from mixval.descriptors import gen_pseudodescriptors
from mixval.errors import ConfigError, MixedLabelKinds
from mixval.harness import (
    ExperimentConfig,
    FileSource,
    config_from_items,
    config_echo,
    derive_seed,
    load_source,
    parse_config_text,
    run_experiment,
    split_rows,
)
from mixval.io import write_descriptor_csv, write_mixture_csv
from mixval.learner import LearnerParams
from mixval.report import read_report, write_report
from mixval.simulate import SimConfig

FAST_FOREST = LearnerParams(n_trees=4, seed=0)


def tiny_sim(**overrides):
    base = dict(n_drugs=10, arity=2, fingerprint_length=8, seed=5)
    base.update(overrides)
    return SimConfig(**base)


# ---------------------------------------------------------------------------
# derive_seed

def test_derive_seed_is_stable_and_tag_sensitive():
    assert derive_seed(1, "a", 2) == derive_seed(1, "a", 2)
    assert derive_seed(1, "a", 2) != derive_seed(1, "a", 3)
    assert derive_seed(1, "a", 2) != derive_seed(2, "a", 2)
    assert derive_seed(1, "a") != derive_seed(1, "b")
    assert derive_seed(1, "x", "y") != derive_seed(1, "y", "x")
    assert derive_seed(0) >= 0


# ---------------------------------------------------------------------------
# run_experiment

def test_cell_count_arithmetic():
    # 2 modes x (1 standard stratum + 3 compounds-out strata) x 5 folds
    config = ExperimentConfig(
        source=SimConfig(n_drugs=16, arity=3, fingerprint_length=16, seed=2),
        k=5,
        strategies=("standard", "compounds-out"),
        descriptor_modes=("pseudo", "y-randomized"),
        metrics=("accuracy",),
        learner=LearnerParams(n_trees=2, seed=0),
        seed=3,
    )
    report = run_experiment(config)
    assert len(report.cells) == 40
    assert report.skips == ()
    combos = {(c.strategy, c.mode, c.stratum, c.fold_index)
              for c in report.cells}
    assert len(combos) == 40
    strata = {c.stratum for c in report.cells if c.strategy == "compounds-out"}
    assert strata == {"1", "2", "3"}
    assert {c.stratum for c in report.cells if c.strategy == "standard"} == {"all"}


def test_validation_sizes_agree_across_modes():
    config = ExperimentConfig(
        source=tiny_sim(),
        k=3,
        strategies=("standard", "compounds-out"),
        descriptor_modes=("pseudo", "y-randomized", "real"),
        metrics=("accuracy",),
        learner=FAST_FOREST,
        seed=1,
    )
    report = run_experiment(config)
    sizes = {}
    for c in report.cells:
        sizes.setdefault((c.strategy, c.stratum, c.fold_index), set()).add(
            c.n_validation)
    # identical splits across modes: one validation size per cell address
    assert all(len(v) == 1 for v in sizes.values())
    modes_seen = {c.mode for c in report.cells}
    assert modes_seen == {"pseudo", "y-randomized", "real"}


def test_standard_strategy_uses_every_record_once():
    config = ExperimentConfig(source=tiny_sim(), k=4,
                              strategies=("standard",),
                              descriptor_modes=("pseudo",),
                              metrics=("accuracy",), learner=FAST_FOREST,
                              seed=2)
    report = run_experiment(config)
    total = sum(c.n_validation for c in report.cells)
    assert total == 45  # choose(10, 2), each record validated exactly once


def test_run_experiment_is_deterministic():
    config = ExperimentConfig(source=tiny_sim(), k=3,
                              strategies=("compounds-out",),
                              descriptor_modes=("pseudo", "y-randomized"),
                              metrics=("accuracy", "auc_roc"),
                              learner=FAST_FOREST, seed=7)
    assert run_experiment(config) == run_experiment(config)


def test_grid_is_complete_on_sparse_data(tmp_path):
    # a small incomplete dataset forces empty and single-class strata;
    # every grid point must still appear exactly once, as cell or skip
    rng = np.random.default_rng(0)
    full = complete_unordered(7, 2, labeler=lambda i, key: int(rng.integers(2)))
    keys = full.sorted_keys()
    picked = [keys[i] for i in rng.choice(len(keys), size=9, replace=False)]
    ds = build_dataset(full.collections, 2, False,
                       [(k.local_ids, full.records[k]) for k in picked])
    mix_path = tmp_path / "mix.csv"
    write_mixture_csv(ds, mix_path)
    config = ExperimentConfig(
        source=FileSource(mixtures=str(mix_path)),
        k=2,
        strategies=("standard", "compounds-out"),
        descriptor_modes=("pseudo",),
        metrics=("accuracy", "auc_roc"),
        learner=FAST_FOREST,
        seed=11,
    )
    report = run_experiment(config)
    addresses = [(c.strategy, c.mode, c.stratum, c.fold_index, c.metric)
                 for c in report.cells]
    addresses += [(s.strategy, s.mode, s.stratum, s.fold_index, s.metric)
                  for s in report.skips]
    assert len(addresses) == len(set(addresses))
    expected = set()
    for strategy, strata in (("standard", ["all"]),
                             ("compounds-out", ["1", "2"])):
        for stratum in strata:
            for fold in range(2):
                for metric in ("accuracy", "auc_roc"):
                    expected.add((strategy, "pseudo", stratum, fold, metric))
    assert set(addresses) == expected
    assert all(s.reason in ("empty stratum", "single-class stratum",
                            "empty training set") for s in report.skips)


def test_y_randomization_changes_only_training_labels():
    config = ExperimentConfig(source=tiny_sim(), k=3,
                              strategies=("standard",),
                              descriptor_modes=("real", "y-randomized"),
                              metrics=("accuracy",), learner=FAST_FOREST,
                              seed=4)
    report = run_experiment(config)
    # same splits, same descriptors: n_validation matches cell for cell
    real = {(c.stratum, c.fold_index): c.n_validation
            for c in report.cells if c.mode == "real"}
    perm = {(c.stratum, c.fold_index): c.n_validation
            for c in report.cells if c.mode == "y-randomized"}
    assert real == perm


def test_pseudo_tables_differ_per_fold():
    pool_seed_a = derive_seed(3, "pseudo-table", 0)
    pool_seed_b = derive_seed(3, "pseudo-table", 1)
    assert pool_seed_a != pool_seed_b


def test_strategy_dataset_mismatch(tmp_path):
    ordered_rows = "constituent_1,constituent_2,label\nx,p,1\nx,q,0\ny,p,0\ny,q,1\n"
    path = tmp_path / "ordered.csv"
    path.write_text(ordered_rows)
    config = ExperimentConfig(
        source=FileSource(mixtures=str(path), ordered=True),
        k=2, strategies=("compounds-out",), descriptor_modes=("pseudo",),
        metrics=("accuracy",), learner=FAST_FOREST, seed=0)
    with pytest.raises(ConfigError, match="compounds-out"):
        run_experiment(config)
    config = ExperimentConfig(
        source=tiny_sim(), k=2, strategies=("fractured",),
        descriptor_modes=("pseudo",), metrics=("accuracy",),
        learner=FAST_FOREST, seed=0)
    with pytest.raises(ConfigError, match="fractured"):
        run_experiment(config)


def test_fractured_strategy_end_to_end(tmp_path):
    rows = ["constituent_1,constituent_2,label"]
    for i, a in enumerate(("w", "x", "y", "z")):
        for j, b in enumerate(("p", "q", "r", "s")):
            rows.append(f"{a},{b},{(i + j) % 2}")
    path = tmp_path / "ordered.csv"
    path.write_text("\n".join(rows) + "\n")
    config = ExperimentConfig(
        source=FileSource(mixtures=str(path), ordered=True),
        k=2, strategies=("fractured",), descriptor_modes=("pseudo",),
        metrics=("accuracy",), learner=FAST_FOREST, seed=6)
    report = run_experiment(config)
    strata = {c.stratum for c in report.cells} | {s.stratum for s in report.skips}
    assert strata == {"10", "01", "11"}


def test_config_validation_errors(tmp_path):
    with pytest.raises(ConfigError):
        ExperimentConfig(k=1)
    with pytest.raises(ConfigError):
        ExperimentConfig(strategies=())
    with pytest.raises(ConfigError):
        ExperimentConfig(strategies=("standard", "standard"))
    with pytest.raises(ConfigError):
        ExperimentConfig(strategies=("bespoke",))
    with pytest.raises(ConfigError):
        ExperimentConfig(descriptor_modes=("oracle",))
    with pytest.raises(ConfigError):
        ExperimentConfig(metrics=("f1",))
    with pytest.raises(ConfigError):
        ExperimentConfig(pseudo_length=0)
    with pytest.raises(ConfigError, match="descriptor file"):
        ExperimentConfig(source=FileSource(mixtures="mix.csv"),
                         descriptor_modes=("real",))


def test_load_source_reads_files(tmp_path):
    ds = complete_unordered(5, 2)
    mix = tmp_path / "mix.csv"
    write_mixture_csv(ds, mix)
    table = gen_pseudodescriptors(ds.collections[0], 4, seed=0)
    desc = tmp_path / "desc.csv"
    write_descriptor_csv(table, desc)
    config = ExperimentConfig(
        source=FileSource(mixtures=str(mix), descriptors=str(desc)),
        descriptor_modes=("real",), metrics=("accuracy",),
        learner=FAST_FOREST)
    dataset, loaded, sim = load_source(config)
    assert sim is None
    assert dict(dataset.records) == dict(ds.records)
    assert loaded.length == 4


# ---------------------------------------------------------------------------
# flat config parsing

def test_parse_config_text():
    items = parse_config_text(
        "# comment\n"
        "\n"
        "seed = 9\n"
        "k=3\n"
        "seed = 10\n")
    assert items == {"seed": "10", "k": "3"}
    with pytest.raises(ConfigError, match="line 2"):
        parse_config_text("seed = 1\nnot a setting\n")


def test_config_from_items_full_sim():
    config = config_from_items({
        "seed": "4",
        "k": "3",
        "source": "sim",
        "sim.n_drugs": "12",
        "sim.arity": "2",
        "sim.noise_variance": "0.25",
        "sim.fingerprint_length": "32",
        "sim.seed": "77",
        "strategies": "compounds-out",
        "modes": "pseudo,y-randomized",
        "metrics": "accuracy,auc_roc",
        "combiner": "sum-range",
        "learner.n_trees": "10",
        "learner.max_depth": "none",
        "learner.min_leaf": "2",
        "learner.features_per_split": "4",
        "pseudo_length": "16",
        "output": "out.json",
    })
    assert config.seed == 4 and config.k == 3
    assert config.source == SimConfig(n_drugs=12, arity=2,
                                      noise_variance=0.25,
                                      fingerprint_length=32, seed=77)
    assert config.strategies == ("compounds-out",)
    assert config.descriptor_modes == ("pseudo", "y-randomized")
    assert config.metrics == ("accuracy", "auc_roc")
    assert config.learner == LearnerParams(n_trees=10, max_depth=None,
                                           min_leaf=2, features_per_split=4,
                                           seed=0)
    assert config.pseudo_length == 16
    assert config.output == "out.json"


def test_sim_seed_defaults_to_a_derived_seed():
    a = config_from_items({"seed": "5"})
    b = config_from_items({"seed": "5"})
    c = config_from_items({"seed": "6"})
    assert isinstance(a.source, SimConfig)
    assert a.source.seed == b.source.seed == derive_seed(5, "sim-data")
    assert a.source.seed != c.source.seed


def test_config_from_items_files_source():
    config = config_from_items({
        "source": "files",
        "mixtures": "mix.csv",
        "descriptors": "desc.csv",
        "ordered": "true",
        "modes": "real",
    })
    assert config.source == FileSource(mixtures="mix.csv",
                                       descriptors="desc.csv", ordered=True)
    with pytest.raises(ConfigError, match="mixtures"):
        config_from_items({"source": "files"})


def test_config_from_items_rejects_bad_values():
    with pytest.raises(ConfigError, match="unknown config keys"):
        config_from_items({"seeed": "1"})
    with pytest.raises(ConfigError, match="integer"):
        config_from_items({"k": "three"})
    with pytest.raises(ConfigError, match="number"):
        config_from_items({"sim.noise_variance": "lots"})
    with pytest.raises(ConfigError, match="boolean"):
        config_from_items({"source": "files", "mixtures": "m.csv",
                           "ordered": "maybe"})
    with pytest.raises(ConfigError, match="unknown source"):
        config_from_items({"source": "database"})
    with pytest.raises(ConfigError, match="features_per_split"):
        config_from_items({"learner.features_per_split": "half"})
    with pytest.raises(ConfigError, match="at least one"):
        config_from_items({"metrics": " , "})
    with pytest.raises(ConfigError):
        config_from_items({"combiner": "mean"})
    with pytest.raises(ConfigError):
        config_from_items({"learner.n_trees": "0"})


def test_config_echo_round_trips_via_report(tmp_path):
    config = ExperimentConfig(source=tiny_sim(), k=2,
                              strategies=("standard",),
                              descriptor_modes=("pseudo",),
                              metrics=("accuracy",), learner=FAST_FOREST,
                              seed=8)
    report = run_experiment(config)
    path = tmp_path / "report.json"
    write_report(report, path)
    assert read_report(path) == report
    assert report.config == config_echo(config)


# ---------------------------------------------------------------------------
# split_rows

def test_split_rows_cover_every_record():
    config = ExperimentConfig(source=tiny_sim(), k=2,
                              strategies=("compounds-out",),
                              descriptor_modes=("pseudo",),
                              metrics=("accuracy",), learner=FAST_FOREST,
                              seed=3)
    dataset, _, _ = load_source(config)
    rows = split_rows(dataset, "compounds-out", config.k, config.seed)
    per_fold = {}
    for key, fold, role, stratum in rows:
        per_fold.setdefault(fold, set()).add(key)
        if role == "training":
            assert stratum == ""
        else:
            assert stratum in ("1", "2")
    expected = {"+".join(k.local_ids) for k in dataset.records}
    for fold, seen in per_fold.items():
        assert seen == expected
