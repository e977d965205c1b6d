"""End-to-end command-line tests, run in-process through ``main(argv)``.

One subprocess smoke test covers the ``python -m`` entry point; everything
else calls ``main`` directly so coverage and tracebacks stay usable.
"""

import json
import subprocess
import sys

import numpy as np
import pytest

from pathgbm.boosting import load_model
from pathgbm.cli import ConfigError, main, parse_fractions, read_config_file
from pathgbm.tudata import write_dataset

from _datasets import path_count_regression_dataset, separable_dataset


@pytest.fixture(scope="module")
def data_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("data") / "separable"
    write_dataset(separable_dataset(), d)
    return str(d)


@pytest.fixture(scope="module")
def regression_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("data") / "counts"
    write_dataset(path_count_regression_dataset(), d, name="counts", task="regression")
    return str(d)


# fast, deterministic settings reused across tests; the low categorical
# threshold pins matching to the node-label column on small training splits
FAST = [
    "--m-stop", "2", "--eta", "1.0", "--max-depth", "2", "--min-leaf", "1",
    "--categorical-threshold", "4",
]


# ------------------------------------------------------------- parsing


def test_parse_fractions_range():
    assert parse_fractions("0.1:0.3:0.1") == (0.1, 0.2, 0.3)


def test_parse_fractions_list():
    assert parse_fractions("0.25, 0.5,1.0") == (0.25, 0.5, 1.0)


@pytest.mark.parametrize(
    "text", ["0.5:0.1:0.1", "0.1:1.0", "a,b", "1.5", "0.1:1.0:-0.1", ""]
)
def test_parse_fractions_rejects(text):
    with pytest.raises(ValueError):
        parse_fractions(text)


def test_read_config_file(tmp_path):
    cfg = tmp_path / "opts.conf"
    cfg.write_text(
        "# comment\n"
        "\n"
        "m-stop = 7\n"
        "eta=0.9  # trailing comment\n"
        "attribute_mode = restricted\n"
    )
    values = read_config_file(cfg)
    assert values == {"m-stop": "7", "eta": "0.9", "attribute-mode": "restricted"}


def test_read_config_file_unknown_key(tmp_path):
    cfg = tmp_path / "opts.conf"
    cfg.write_text("learning-rate = 0.1\n")
    with pytest.raises(ConfigError, match="unknown option"):
        read_config_file(cfg)


def test_read_config_file_malformed_line(tmp_path):
    cfg = tmp_path / "opts.conf"
    cfg.write_text("m-stop\n")
    with pytest.raises(ConfigError, match="opts.conf:1"):
        read_config_file(cfg)


def test_read_config_file_missing(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        read_config_file(tmp_path / "absent.conf")


# ------------------------------------------------------------- train


def test_train_writes_model_and_log(data_dir, tmp_path, capsys):
    out = tmp_path / "run"
    code = main(["train", data_dir, "--out", str(out)] + FAST)
    assert code == 0
    stdout = capsys.readouterr().out
    assert "trained 2 stages on 40 graphs" in stdout
    model = load_model(out / "model.json")
    assert len(model.stages) == 2
    log_lines = (out / "train_log.csv").read_text().splitlines()
    assert log_lines[0] == "iteration,path,train_loss,loss_reduction,relative_reduction,pool_size"
    assert len(log_lines) == 3
    assert (out / "resolved_config").exists()


def test_train_dumps_features_and_predictions(data_dir, tmp_path):
    out = tmp_path / "run"
    code = main(
        ["train", data_dir, "--out", str(out), "--dump-features", "--dump-predictions"]
        + FAST
    )
    assert code == 0
    preds = (out / "predictions.csv").read_text().splitlines()
    assert preds[0] == "graph,logit,probability,label,target"
    assert len(preds) == 41
    for line in preds[1:]:
        cells = line.split(",")
        assert cells[3] == cells[4]  # training fit is exact on this data
    feats = (out / "features.csv").read_text().splitlines()
    assert feats[0].startswith("graph,")
    assert len(feats) == 41


def test_train_respects_limit(data_dir, tmp_path, capsys):
    out = tmp_path / "run"
    code = main(["train", data_dir, "--out", str(out), "--limit", "10"] + FAST)
    assert code == 0
    assert "on 10 graphs" in capsys.readouterr().out


def test_config_file_precedence(data_dir, tmp_path):
    cfg = tmp_path / "opts.conf"
    cfg.write_text("m-stop = 7\neta = 0.9\nmin-leaf = 1\ncategorical-threshold = 4\n")
    out = tmp_path / "run"
    code = main(
        ["train", data_dir, "--config", str(cfg), "--out", str(out), "--m-stop", "2"]
    )
    assert code == 0
    resolved = read_config_file(out / "resolved_config")
    assert resolved["m-stop"] == "2"  # flag beats file
    assert resolved["eta"] == "0.9"  # file beats default
    assert resolved["min-leaf"] == "1"
    assert resolved["max-depth"] == "3"  # untouched default


def test_resolved_config_is_reusable(data_dir, tmp_path):
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    assert main(["train", data_dir, "--out", str(out1)] + FAST) == 0
    assert (
        main(
            [
                "train", data_dir,
                "--config", str(out1 / "resolved_config"),
                "--out", str(out2),
            ]
        )
        == 0
    )
    assert (out1 / "model.json").read_bytes() == (out2 / "model.json").read_bytes()
    a = read_config_file(out1 / "resolved_config")
    b = read_config_file(out2 / "resolved_config")
    a.pop("out")
    b.pop("out")
    assert a == b


def test_user_anchor_mode_flags(data_dir, tmp_path, capsys):
    out = tmp_path / "run"
    code = main(
        ["train", data_dir, "--out", str(out),
         "--anchor-mode", "user", "--anchor-labels", "1"]
        + FAST
    )
    assert code == 0
    model = load_model(out / "model.json")
    assert model.allowed_labels == frozenset({1})


# ------------------------------------------------------------- importance


def test_importance_command(data_dir, tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["train", data_dir, "--out", str(out)] + FAST) == 0
    capsys.readouterr()
    code = main(["importance", str(out / "model.json"), "--out", str(out)])
    assert code == 0
    lines = (out / "importance.csv").read_text().splitlines()
    assert lines[0] == "path,absolute,relative"
    assert len(lines) >= 2
    top = lines[1].split(",")
    assert float(top[1]) == 100.0
    assert "absolute=100.00" in capsys.readouterr().out


# ------------------------------------------------------------- cv


def test_cv_writes_reports(data_dir, tmp_path, capsys):
    out = tmp_path / "run"
    code = main(
        ["cv", data_dir, "--out", str(out), "--folds", "3", "--repetitions", "2",
         "--dump-predictions"]
        + FAST
    )
    assert code == 0
    assert "accuracy: 100.00 +/- 0.00" in capsys.readouterr().out
    doc = json.loads((out / "cv_report.json").read_text())
    assert doc["metrics"]["accuracy"]["mean"] == 100.0
    assert doc["plan"] == {
        "folds": 3, "repetitions": 2, "seed": 0, "stratified": True,
    }
    assert len(doc["folds"]) == 6
    assert len(doc["layout_hashes"]) == 2
    csv_lines = (out / "cv_report.csv").read_text().splitlines()
    assert len(csv_lines) == 7
    pred_lines = (out / "predictions.csv").read_text().splitlines()
    assert len(pred_lines) == 1 + 2 * 40


def test_cv_byte_identical_across_runs_and_threads(data_dir, tmp_path):
    outs = [tmp_path / n for n in ("a", "b", "c")]
    for out, threads in zip(outs, ("1", "1", "2")):
        code = main(
            ["cv", data_dir, "--out", str(out), "--folds", "3",
             "--repetitions", "1", "--threads", threads]
            + FAST
        )
        assert code == 0
    ref_json = (outs[0] / "cv_report.json").read_bytes()
    ref_csv = (outs[0] / "cv_report.csv").read_bytes()
    for out in outs[1:]:
        assert (out / "cv_report.json").read_bytes() == ref_json
        assert (out / "cv_report.csv").read_bytes() == ref_csv


def test_cv_regression_task(regression_dir, tmp_path, capsys):
    out = tmp_path / "run"
    code = main(
        ["cv", regression_dir, "--out", str(out), "--task", "regression",
         "--folds", "3", "--repetitions", "1",
         "--m-stop", "8", "--eta", "0.5", "--max-depth", "2", "--min-leaf", "2"]
    )
    assert code == 0
    doc = json.loads((out / "cv_report.json").read_text())
    assert set(doc["metrics"]) == {"mae", "r2"}
    assert doc["metrics"]["mae"]["mean"] < 0.5
    assert "mae:" in capsys.readouterr().out


def test_cv_grid_flag(data_dir, tmp_path):
    out = tmp_path / "run"
    code = main(
        ["cv", data_dir, "--out", str(out), "--folds", "3", "--repetitions", "1",
         "--grid", "--grid-m-stop", "1,2", "--grid-eta", "1.0",
         "--grid-max-depth", "1", "--validation-fraction", "0.2"]
        + FAST
    )
    assert code == 0
    doc = json.loads((out / "cv_report.json").read_text())
    assert doc["grid_used"] is True
    assert all(f["m_stop"] == 1 for f in doc["folds"])


# ------------------------------------------------------------- curve


def test_learning_curve_command(data_dir, tmp_path, capsys):
    out = tmp_path / "run"
    code = main(
        ["learning-curve", data_dir, "--out", str(out),
         "--folds", "3", "--repetitions", "1", "--fractions", "0.5,1.0"]
        + FAST
    )
    assert code == 0
    lines = (out / "learning_curve.csv").read_text().splitlines()
    assert lines[0] == "fraction,accuracy_mean,accuracy_std,f1_macro_mean,f1_macro_std"
    assert len(lines) == 3
    assert lines[1].startswith("0.5,")
    assert lines[2].startswith("1.0,")
    assert "fraction 1.0" in capsys.readouterr().out


# ------------------------------------------------------------- exit codes


def test_exit_codes(data_dir, tmp_path, capsys):
    # missing dataset directory: input problem
    assert main(["train", str(tmp_path / "nowhere"), "--out", str(tmp_path)]) == 2
    # unknown flag: usage problem
    assert main(["train", data_dir, "--no-such-flag"]) == 2
    # malformed fraction flag: usage problem
    assert main(["learning-curve", data_dir, "--fractions", "nope"]) == 2
    # invalid hyperparameter: configuration problem
    assert main(["train", data_dir, "--out", str(tmp_path), "--m-stop", "0"]) == 4
    assert main(["cv", data_dir, "--out", str(tmp_path), "--folds", "1"]) == 4
    # unreadable model: model problem
    assert main(["importance", str(tmp_path / "no-model.json")]) == 3
    capsys.readouterr()


def test_config_file_bad_value_exits_4(data_dir, tmp_path, capsys):
    cfg = tmp_path / "opts.conf"
    cfg.write_text("m-stop = many\n")
    assert main(["train", data_dir, "--config", str(cfg), "--out", str(tmp_path)]) == 4
    assert "bad value" in capsys.readouterr().err


def test_module_entry_point(data_dir, tmp_path):
    out = tmp_path / "run"
    proc = subprocess.run(
        [sys.executable, "-m", "pathgbm", "train", data_dir, "--out", str(out)] + FAST,
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert (out / "model.json").exists()
