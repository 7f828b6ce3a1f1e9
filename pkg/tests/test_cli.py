import json

import numpy as np
import pytest

from concealed_labels.cli import main
from concealed_labels.verification import CheckResult, format_check_table, run_all_checks

CFG = """
dataset.kind = gaussian
dataset.n_per_class = 40
dataset.test_n_per_class = 30
dataset.centers = 0 0; 5 0; 0 5
dataset.sigma = 0.8
class_space.num_classes = 2
class_space.subset_size = 1
class_space.concealed_source_labels = secret
train.epochs = 3
train.batch_size = 32
train.seed = 3
train.trials = 1
train.lr_grid = 0.05
"""


@pytest.fixture
def config_path(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text(CFG)
    return path


def test_synthesize(config_path, tmp_path, capsys):
    out = tmp_path / "synth"
    code = main(["synthesize", "--config", str(config_path), "--out", str(out)])
    assert code == 0
    lines = (out / "concealed.csv").read_text().splitlines()
    assert lines[0] == "features_ref,annotation,sampled_set"
    assert len(lines) == 121  # 3 classes x 40 samples + header
    features = np.load(out / "features.npy")
    assert features.shape == (120, 2)
    annotations = {line.split(",")[1] for line in lines[1:]}
    assert "none" in annotations
    assert annotations <= {"none", "1", "2"}


def test_train_and_evaluate_and_negrisk(config_path, tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["train", "--config", str(config_path), "--out", str(out)]) == 0
    captured = capsys.readouterr().out
    assert "test accuracy" in captured

    assert main([
        "evaluate", "--config", str(config_path),
        "--checkpoint", str(out / "model.npz"),
    ]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert 0.0 <= payload["test_accuracy"] <= 1.0
    assert len(payload["per_class_recall"]) == 3

    plot = tmp_path / "plot.csv"
    assert main([
        "negrisk-report", "--metrics", str(out / "metrics.csv"), "--out", str(plot)
    ]) == 0
    assert plot.exists()


def test_train_seed_and_trials_override(config_path, tmp_path):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    assert main(["train", "--config", str(config_path), "--out", str(out_a),
                 "--seed", "9", "--trials", "2"]) == 0
    assert main(["train", "--config", str(config_path), "--out", str(out_b),
                 "--seed", "9", "--trials", "2"]) == 0
    assert (out_a / "metrics.csv").read_bytes() == (out_b / "metrics.csv").read_bytes()
    summary = json.loads((out_a / "summary.json").read_text())
    assert summary["trials"] == 2


def test_sweep_l_cli(config_path, tmp_path, capsys):
    fast_cfg = tmp_path / "fast.cfg"
    fast_cfg.write_text(CFG.replace("train.epochs = 3", "train.epochs = 1"))
    out = tmp_path / "sweep"
    code = main(["sweep-l", "--config", str(fast_cfg), "--out", str(out),
                 "--l-values", "1,2"])
    assert code == 0
    assert (out / "sweep.csv").exists()
    assert "subset size 1" in capsys.readouterr().out


def test_verify_cli_passes(capsys):
    assert main(["verify", "--seed", "0"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "FAIL" not in out


def test_verify_checks_all_pass_by_default():
    results = run_all_checks(seed=0)
    assert len(results) == 5
    assert all(r.passed for r in results)


def test_format_table_reports_failures():
    table = format_check_table([
        CheckResult("good", True, "fine"),
        CheckResult("bad", False, "broken"),
    ])
    assert "PASS" in table and "FAIL" in table


def test_verify_exit_code_propagates_failure(monkeypatch, capsys):
    from concealed_labels import cli

    monkeypatch.setattr(
        cli, "run_all_checks", lambda seed: [CheckResult("forced", False, "boom")]
    )
    assert main(["verify"]) == 1
