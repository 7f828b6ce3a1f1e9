"""Experiment orchestration: dataset prep, trials, metrics, sweeps.

Every run is deterministic given its config: trial ``t`` uses seed
``base_seed + t``, and every random stream (data generation, annotation,
splitting, initialization, batching) is derived from a (seed, purpose) pair.
The annotation draw is part of the trial, so trial-to-trial variance
includes the channel randomness.
"""

from __future__ import annotations

import csv
import json
import time
import warnings
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .class_space import CONCEALED, NONE_LABEL
from .config import ExperimentConfig
from .data import ConcealedData, LabeledData, annotate_dataset, make_gaussian_mixture
from .idx import load_idx_pair
from .losses import LossSpec
from .models import (
    Adam,
    EpochStats,
    LinearModel,
    MLPModel,
    SGD,
    ScoreModel,
    evaluate,
    save_checkpoint,
    train,
)
from .risk import Correction, empirical_risk

METRICS_SCHEMA = "concealed-labels-metrics/1"
METRICS_COLUMNS = [
    "trial",
    "epoch",
    "free_risk",
    "corrected_risk",
    "labeled_term",
    "none_term",
    "subtract_term",
    "train_accuracy",
    "test_accuracy",
    "per_class_accuracies",
]

# Stream purposes for seed derivation.
_DATA, _ANNOTATE, _SPLIT, _INIT, _BATCH = range(5)


def _rng(seed: int, purpose: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, purpose]))


@dataclass
class MetricsRow:
    trial: int
    epoch: int
    free_risk: float
    corrected_risk: float
    labeled_term: float
    none_term: float
    subtract_term: float
    train_accuracy: float | None
    test_accuracy: float
    per_class_accuracies: np.ndarray

    def to_csv(self) -> list[str]:
        return [
            str(self.trial),
            str(self.epoch),
            repr(self.free_risk),
            repr(self.corrected_risk),
            repr(self.labeled_term),
            repr(self.none_term),
            repr(self.subtract_term),
            "" if self.train_accuracy is None else repr(self.train_accuracy),
            repr(self.test_accuracy),
            ";".join(repr(float(v)) for v in self.per_class_accuracies),
        ]

    @staticmethod
    def from_csv(row: list[str]) -> "MetricsRow":
        return MetricsRow(
            trial=int(row[0]),
            epoch=int(row[1]),
            free_risk=float(row[2]),
            corrected_risk=float(row[3]),
            labeled_term=float(row[4]),
            none_term=float(row[5]),
            subtract_term=float(row[6]),
            train_accuracy=None if row[7] == "" else float(row[7]),
            test_accuracy=float(row[8]),
            per_class_accuracies=np.array([float(v) for v in row[9].split(";")]),
        )


def write_metrics(path, rows: list[MetricsRow]) -> None:
    with open(path, "w", newline="") as f:
        f.write(f"# schema: {METRICS_SCHEMA}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(METRICS_COLUMNS)
        for row in rows:
            writer.writerow(row.to_csv())


def read_metrics(path) -> list[MetricsRow]:
    with open(path, newline="") as f:
        first = f.readline().strip()
        if first != f"# schema: {METRICS_SCHEMA}":
            raise ValueError(f"unrecognized metrics schema line: {first!r}")
        reader = csv.reader(f)
        header = next(reader)
        if header != METRICS_COLUMNS:
            raise ValueError("metrics header does not match schema")
        return [MetricsRow.from_csv(row) for row in reader if row]


def load_dataset(config: ExperimentConfig) -> tuple[LabeledData, LabeledData]:
    """Materialize the supervised (train, test) pair named by the config."""
    if config.dataset_kind == "idx":
        space = config.space()
        train_data = load_idx_pair(config.dataset_train_images, config.dataset_train_labels, space)
        test_data = load_idx_pair(config.dataset_test_images, config.dataset_test_labels, space)
        return train_data, test_data
    centers = config.centers()
    train_data = make_gaussian_mixture(
        config.dataset_n_per_class, centers, config.dataset_sigma,
        _rng(config.train_seed, _DATA),
    )
    test_data = make_gaussian_mixture(
        config.dataset_test_n_per_class, centers, config.dataset_sigma,
        _rng(config.train_seed + 1_000_003, _DATA),
    )
    return train_data, test_data


def build_model_from_config(config: ExperimentConfig, n_features: int, rng) -> ScoreModel:
    n_outputs = config.class_space_num_classes + 1
    if config.model_kind == "mlp":
        return MLPModel(n_features, config.model_hidden, n_outputs, rng)
    return LinearModel(n_features, n_outputs, rng)


def build_optimizer(config: ExperimentConfig, lr: float):
    if config.optimizer_kind == "sgd":
        return SGD(lr, config.optimizer_weight_decay)
    return Adam(lr, weight_decay=config.optimizer_weight_decay)


def stratified_split(concealed: ConcealedData, fraction: float, rng) -> tuple[np.ndarray, np.ndarray]:
    """(fit_idx, val_idx): both annotation partitions represented on each side."""
    fit_parts, val_parts = [], []
    for mask in (concealed.labeled_mask, ~concealed.labeled_mask):
        idx = rng.permutation(np.where(mask)[0])
        if len(idx) < 2:
            fit_parts.append(idx)
            continue
        n_val = min(len(idx) - 1, max(1, int(round(fraction * len(idx)))))
        val_parts.append(idx[:n_val])
        fit_parts.append(idx[n_val:])
    return np.concatenate(fit_parts), np.concatenate(val_parts) if val_parts else np.empty(0, dtype=int)


def concealed_accuracy(model: ScoreModel, batch: ConcealedData) -> float:
    """Agreement with annotations, reading the none label as the concealed class."""
    from .models import predict

    target = np.where(batch.s == NONE_LABEL, CONCEALED, batch.s)
    return float(np.mean(predict(model, batch.x) == target))


def _validation_score(
    model: ScoreModel,
    val: ConcealedData,
    loss_spec: LossSpec,
    config: ExperimentConfig,
) -> float:
    """Higher is better."""
    if config.train_selection_metric == "concealed_accuracy":
        return concealed_accuracy(model, val)
    report = empirical_risk(
        val, model.forward(val.x), loss_spec, config.space(),
        Correction.FREE, allow_empty=True,
    )
    return -report.total


def select_learning_rate(
    config: ExperimentConfig,
    concealed: ConcealedData,
    trial_seed: int,
) -> float:
    """Train one candidate per grid value on a fit split, score on validation."""
    grid = config.lr_grid()
    if len(grid) == 1:
        return grid[0]
    space = config.space()
    loss_spec = config.loss_spec()
    fit_idx, val_idx = stratified_split(
        concealed, config.train_validation_fraction, _rng(trial_seed, _SPLIT)
    )
    fit, val = concealed.subset(fit_idx), concealed.subset(val_idx)
    best = None
    for gi, lr in enumerate(grid):
        model = build_model_from_config(config, concealed.dim, _rng(trial_seed, _INIT))
        train(
            model, fit, space, loss_spec, config.correction(),
            build_optimizer(config, lr), config.train_epochs,
            config.train_batch_size, int(np.random.SeedSequence([trial_seed, _BATCH, gi]).generate_state(1)[0]),
        )
        score = _validation_score(model, val, loss_spec, config)
        if best is None or score > best[0]:
            best = (score, lr)
    return best[1]


@dataclass
class TrialResult:
    trial: int
    seed: int
    learning_rate: float
    test_accuracy: float
    per_class_accuracies: np.ndarray
    validation_score: float
    model: ScoreModel
    log: list[EpochStats]


@dataclass
class ExperimentResult:
    trials: list[TrialResult]
    metrics_path: Path
    checkpoint_path: Path
    summary_path: Path
    summary: dict


def run_experiment(config: ExperimentConfig, out_dir) -> ExperimentResult:
    """Run all trials; write metrics CSV, best checkpoint and summary."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    space = config.space()
    loss_spec = config.loss_spec()
    mode = config.correction()
    source_train, source_test = load_dataset(config)

    rows: list[MetricsRow] = []
    results: list[TrialResult] = []
    timings: list[tuple[int, float]] = []
    for trial in range(config.train_trials):
        started = time.perf_counter()
        trial_seed = config.train_seed + trial
        concealed = annotate_dataset(source_train, space, _rng(trial_seed, _ANNOTATE))
        lr = select_learning_rate(config, concealed, trial_seed)
        model = build_model_from_config(config, concealed.dim, _rng(trial_seed, _INIT))
        model, log = train(
            model, concealed, space, loss_spec, mode,
            build_optimizer(config, lr), config.train_epochs,
            config.train_batch_size,
            int(np.random.SeedSequence([trial_seed, _BATCH]).generate_state(1)[0]),
            test_data=source_test,
            train_eval_data=source_train if config.train_log_train_accuracy else None,
        )
        accuracy, per_class = evaluate(model, source_test)
        fit_idx, val_idx = stratified_split(
            concealed, config.train_validation_fraction, _rng(trial_seed, _SPLIT)
        )
        val_score = _validation_score(model, concealed.subset(val_idx), loss_spec, config)
        for stats in log:
            rows.append(
                MetricsRow(
                    trial=trial,
                    epoch=stats.epoch,
                    free_risk=stats.free_risk,
                    corrected_risk=stats.corrected_risk,
                    labeled_term=stats.labeled_term,
                    none_term=stats.none_term,
                    subtract_term=stats.subtract_term,
                    train_accuracy=stats.train_accuracy,
                    test_accuracy=stats.test_accuracy,
                    per_class_accuracies=stats.test_per_class,
                )
            )
        results.append(
            TrialResult(trial, trial_seed, lr, accuracy, per_class, val_score, model, log)
        )
        timings.append((trial, time.perf_counter() - started))

    metrics_path = out_dir / "metrics.csv"
    write_metrics(metrics_path, rows)
    _write_timings(out_dir / "timings.csv", timings)

    best = max(results, key=lambda r: (r.validation_score, -r.trial))
    checkpoint_path = out_dir / "model.npz"
    save_checkpoint(
        checkpoint_path, best.model, space, loss_spec,
        extra={"trial": best.trial, "learning_rate": best.learning_rate},
    )

    accuracies = np.array([r.test_accuracy for r in results])
    summary = {
        "schema": "concealed-labels-summary/1",
        "trials": config.train_trials,
        "test_accuracy_mean": float(accuracies.mean()),
        "test_accuracy_std": float(accuracies.std(ddof=1)) if len(accuracies) > 1 else 0.0,
        "per_trial_test_accuracy": [float(a) for a in accuracies],
        "per_trial_learning_rate": [r.learning_rate for r in results],
        "per_class_recall_mean": [
            float(v) for v in np.nanmean([r.per_class_accuracies for r in results], axis=0)
        ],
        "best_trial": best.trial,
        # Accuracy counts all K+1 classes, concealed class included; the
        # per-class recall vector separates the concealed class (last entry).
        "accuracy_definition": "overall K+1-class accuracy (concealed class included)",
    }
    summary_path = out_dir / "summary.json"
    summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return ExperimentResult(results, metrics_path, checkpoint_path, summary_path, summary)


def _write_timings(path, timings) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["trial", "wall_seconds"])
        for trial, seconds in timings:
            writer.writerow([trial, f"{seconds:.3f}"])


def sweep_subset_sizes(config: ExperimentConfig, sizes, out_dir) -> dict[int, dict]:
    """Re-annotate and train for each subset size; emit an accuracy table."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    unique = []
    for size in sizes:
        size = int(size)
        if size in unique:
            warnings.warn(f"duplicate subset size {size} ignored", stacklevel=2)
            continue
        unique.append(size)
    summaries: dict[int, dict] = {}
    for size in unique:
        sub_config = replace(config, class_space_subset_size=size)
        result = run_experiment(sub_config, out_dir / f"subset_size_{size}")
        summaries[size] = result.summary
    table_path = out_dir / "sweep.csv"
    with open(table_path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["subset_size", "test_accuracy_mean", "test_accuracy_std"])
        for size in unique:
            writer.writerow(
                [
                    size,
                    repr(summaries[size]["test_accuracy_mean"]),
                    repr(summaries[size]["test_accuracy_std"]),
                ]
            )
    return summaries


def negative_risk_report(metrics_path, out_path, trial: int = 0) -> tuple[Path, int | None]:
    """Columnar plot data plus the first epoch with negative free risk, if any."""
    rows = [r for r in read_metrics(metrics_path) if r.trial == trial]
    if not rows:
        raise ValueError(f"no rows for trial {trial}")
    rows.sort(key=lambda r: r.epoch)
    first_negative = next((r.epoch for r in rows if r.free_risk < 0.0), None)
    out_path = Path(out_path)
    with open(out_path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["epoch", "free_risk", "corrected_risk", "test_accuracy"])
        for r in rows:
            writer.writerow(
                [
                    r.epoch,
                    repr(r.free_risk),
                    repr(r.corrected_risk),
                    "" if r.test_accuracy is None else repr(r.test_accuracy),
                ]
            )
    return out_path, first_negative
