"""Command-line behavior: subcommands, overrides, exit codes."""

import json
import subprocess
import sys

import pytest

from mixval.cli import main
from mixval.io import load_descriptor_csv, load_mixture_csv
from mixval.report import read_report


def last_stderr_json(capsys):
    err = [line for line in capsys.readouterr().err.splitlines() if line]
    payload = json.loads(err[-1])
    assert set(payload) == {"error", "message"}
    return payload


def run_config(tmp_path, extra=""):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "source = sim\n"
        "sim.n_drugs = 10\n"
        "sim.arity = 2\n"
        "sim.fingerprint_length = 8\n"
        "sim.seed = 5\n"
        "k = 2\n"
        "strategies = compounds-out\n"
        "modes = pseudo\n"
        "metrics = accuracy\n"
        "learner.n_trees = 4\n"
        "seed = 1\n" + extra)
    return cfg


# ---------------------------------------------------------------------------
# subcommands

def test_simulate_writes_loadable_files(tmp_path, capsys):
    code = main(["simulate", "-D", "8", "-N", "2", "-L", "4",
                 "--seed", "3", "--out-dir", str(tmp_path)])
    assert code == 0
    out = capsys.readouterr().out
    assert "mixtures.csv" in out and "descriptors.csv" in out
    ds = load_mixture_csv(tmp_path / "mixtures.csv")
    assert len(ds.records) == 28  # choose(8, 2)
    table = load_descriptor_csv(tmp_path / "descriptors.csv")
    assert table.length == 4
    assert set(table.vectors) == set(ds.collections[0].members)


def test_split_emits_fold_membership(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    code = main(["split", "--config", str(run_config(tmp_path)),
                 "--output", "splits.csv"])
    assert code == 0
    text = (tmp_path / "splits.csv").read_text().splitlines()
    assert text[0] == "key,fold,role,stratum"
    assert len(text) == 1 + 2 * 45  # every record appears once per fold


def test_run_writes_report_and_csv(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    code = main(["run", "--config", str(run_config(tmp_path)),
                 "--output", "report.json"])
    assert code == 0
    report = read_report(tmp_path / "report.json")
    assert report.config["k"] == 2
    csv_lines = (tmp_path / "report.csv").read_text().splitlines()
    assert csv_lines[0] == ("strategy,mode,stratum,fold_index,metric,"
                            "value,n_validation")
    assert len(csv_lines) == 1 + len(report.cells)


def test_cli_overrides_beat_config_values(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    code = main(["run", "--config", str(run_config(tmp_path)),
                 "--seed", "42", "-k", "3",
                 "--strategy", "standard", "--strategy", "compounds-out",
                 "--metric", "accuracy", "--metric", "auc_roc",
                 "--output", "report.json"])
    assert code == 0
    config = read_report(tmp_path / "report.json").config
    assert config["seed"] == 42
    assert config["k"] == 3
    assert config["strategies"] == ["standard", "compounds-out"]
    assert config["metrics"] == ["accuracy", "auc_roc"]


def test_mixtures_flag_switches_source_to_files(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    assert main(["simulate", "-D", "8", "-N", "2", "-L", "4",
                 "--out-dir", str(tmp_path)]) == 0
    code = main(["run", "--mixtures", str(tmp_path / "mixtures.csv"),
                 "--mode", "pseudo", "-k", "2", "--output", "report.json"])
    assert code == 0
    config = read_report(tmp_path / "report.json").config
    assert config["source"]["type"] == "files"


def test_report_pretty_prints(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    main(["run", "--config", str(run_config(tmp_path)),
          "--output", "report.json"])
    capsys.readouterr()
    code = main(["report", "report.json"])
    assert code == 0
    out = capsys.readouterr().out
    assert "compounds-out / pseudo / accuracy:" in out
    assert "stratum" in out


# ---------------------------------------------------------------------------
# exit codes and error lines

def test_usage_error_exits_1_with_json_line(capsys):
    assert main(["run", "--no-such-flag"]) == 1
    assert last_stderr_json(capsys)["error"] == "UsageError"


def test_unknown_subcommand_exits_1(capsys):
    assert main(["transmogrify"]) == 1
    last_stderr_json(capsys)


def test_config_error_exits_1(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("nonsense_key = 1\n")
    assert main(["run", "--config", str(cfg)]) == 1
    assert last_stderr_json(capsys)["error"] == "ConfigError"


def test_missing_mixture_file_exits_1(tmp_path, capsys):
    assert main(["run", "--mixtures", str(tmp_path / "absent.csv"),
                 "--mode", "pseudo"]) == 1
    assert last_stderr_json(capsys)["error"] == "ParseError"


def test_runtime_error_exits_2(tmp_path, monkeypatch, capsys):
    # more folds than drugs: valid config, fails while splitting
    monkeypatch.chdir(tmp_path)
    assert main(["run", "--config", str(run_config(tmp_path)),
                 "-k", "11"]) == 2
    assert last_stderr_json(capsys)["error"] == "TooManyFolds"


def test_report_on_missing_file_exits_2(tmp_path, capsys):
    assert main(["report", str(tmp_path / "absent.json")]) == 2
    last_stderr_json(capsys)


def test_help_exits_0(capsys):
    assert main(["--help"]) == 0
    assert "simulate" in capsys.readouterr().out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "mixval", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "mixture-aware model validation" in proc.stdout
