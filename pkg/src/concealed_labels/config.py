"""Experiment configuration: a flat text format with dotted keys.

One ``key = value`` pair per line, ``#`` comments.  Unknown keys are errors;
silent config typos are the main reproducibility hazard.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .class_space import ClassSpace
from .losses import LossFamily, LossSpec, Surrogate
from .risk import Correction


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    # dataset
    dataset_kind: str = "gaussian"            # "idx" | "gaussian"
    dataset_train_images: str = ""
    dataset_train_labels: str = ""
    dataset_test_images: str = ""
    dataset_test_labels: str = ""
    dataset_n_per_class: int = 200
    dataset_test_n_per_class: int = 100
    dataset_centers: str = "0 0; 3 0; 0 3"    # semicolon-separated vectors, last = concealed
    dataset_sigma: float = 1.0
    # class space
    class_space_num_classes: int = 2
    class_space_subset_size: int = 1
    class_space_concealed_source_labels: str = "concealed"
    # loss
    loss_family: str = "ovr"
    loss_surrogate: str = "square"
    loss_clamp: float = 50.0
    # risk
    risk_correction: str = "free"
    # model
    model_kind: str = "linear"                # "linear" | "mlp"
    model_hidden: int = 512
    # optimizer
    optimizer_kind: str = "adam"
    optimizer_weight_decay: float = 0.0
    # training
    train_epochs: int = 100
    train_batch_size: int = 256
    train_seed: int = 0
    train_trials: int = 1
    train_lr_grid: str = "0.01"
    train_validation_fraction: float = 0.1
    train_selection_metric: str = "risk"      # "risk" | "concealed_accuracy"
    train_log_train_accuracy: bool = False

    def __post_init__(self):
        if self.dataset_kind not in ("idx", "gaussian"):
            raise ConfigError(f"dataset.kind must be idx or gaussian, got {self.dataset_kind!r}")
        if self.train_trials < 1:
            raise ConfigError("train.trials must be at least 1")
        if not (0.0 < self.train_validation_fraction < 1.0):
            raise ConfigError("train.validation_fraction must lie in (0, 1)")
        if self.train_selection_metric not in ("risk", "concealed_accuracy"):
            raise ConfigError("train.selection_metric must be risk or concealed_accuracy")
        if self.model_kind not in ("linear", "mlp"):
            raise ConfigError("model.kind must be linear or mlp")
        if self.optimizer_kind not in ("adam", "sgd"):
            raise ConfigError("optimizer.kind must be adam or sgd")
        if not self.lr_grid():
            raise ConfigError("train.lr_grid must contain at least one value")

    # -- typed views ------------------------------------------------------

    def space(self) -> ClassSpace:
        labels = [v.strip() for v in self.class_space_concealed_source_labels.split(",") if v.strip()]
        return ClassSpace(
            self.class_space_num_classes,
            self.class_space_subset_size,
            frozenset(labels),
        )

    def loss_spec(self) -> LossSpec:
        family = LossFamily(self.loss_family)
        surrogate = Surrogate(self.loss_surrogate) if family is LossFamily.OVR else None
        return LossSpec(family, surrogate, self.loss_clamp)

    def correction(self) -> Correction:
        return Correction(self.risk_correction)

    def lr_grid(self) -> list[float]:
        return [float(v) for v in self.train_lr_grid.split(",") if v.strip()]

    def centers(self) -> np.ndarray:
        rows = [r for r in self.dataset_centers.split(";") if r.strip()]
        return np.array([[float(v) for v in r.split()] for r in rows])


_KEY_TO_FIELD = {
    "dataset.kind": "dataset_kind",
    "dataset.train_images": "dataset_train_images",
    "dataset.train_labels": "dataset_train_labels",
    "dataset.test_images": "dataset_test_images",
    "dataset.test_labels": "dataset_test_labels",
    "dataset.n_per_class": "dataset_n_per_class",
    "dataset.test_n_per_class": "dataset_test_n_per_class",
    "dataset.centers": "dataset_centers",
    "dataset.sigma": "dataset_sigma",
    "class_space.num_classes": "class_space_num_classes",
    "class_space.subset_size": "class_space_subset_size",
    "class_space.concealed_source_labels": "class_space_concealed_source_labels",
    "loss.family": "loss_family",
    "loss.surrogate": "loss_surrogate",
    "loss.clamp": "loss_clamp",
    "risk.correction": "risk_correction",
    "model.kind": "model_kind",
    "model.hidden": "model_hidden",
    "optimizer.kind": "optimizer_kind",
    "optimizer.weight_decay": "optimizer_weight_decay",
    "train.epochs": "train_epochs",
    "train.batch_size": "train_batch_size",
    "train.seed": "train_seed",
    "train.trials": "train_trials",
    "train.lr_grid": "train_lr_grid",
    "train.validation_fraction": "train_validation_fraction",
    "train.selection_metric": "train_selection_metric",
    "train.log_train_accuracy": "train_log_train_accuracy",
}
_FIELD_TO_KEY = {v: k for k, v in _KEY_TO_FIELD.items()}


def _coerce(raw: str, target_type):
    if target_type is bool:
        if raw.lower() in ("true", "1", "yes"):
            return True
        if raw.lower() in ("false", "0", "no"):
            return False
        raise ConfigError(f"expected boolean, got {raw!r}")
    return target_type(raw)


def parse_config(text: str) -> ExperimentConfig:
    values: dict = {}
    types = {f.name: f.type for f in fields(ExperimentConfig)}
    concrete = {"str": str, "int": int, "float": float, "bool": bool}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in _KEY_TO_FIELD:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        name = _KEY_TO_FIELD[key]
        if name in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[name] = _coerce(raw, concrete[types[name]])
        except (TypeError, ValueError) as e:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {e}") from e
    return ExperimentConfig(**values)


def load_config(path, check_files: bool = True) -> ExperimentConfig:
    config = parse_config(Path(path).read_text())
    if check_files and config.dataset_kind == "idx":
        for key in ("dataset_train_images", "dataset_train_labels",
                    "dataset_test_images", "dataset_test_labels"):
            value = getattr(config, key)
            if not value or not Path(value).exists():
                raise ConfigError(f"{_FIELD_TO_KEY[key]}: file not found: {value!r}")
    return config


def dump_config(config: ExperimentConfig) -> str:
    lines = []
    for f in fields(ExperimentConfig):
        value = getattr(config, f.name)
        if isinstance(value, bool):
            value = "true" if value else "false"
        lines.append(f"{_FIELD_TO_KEY[f.name]} = {value}")
    return "\n".join(lines) + "\n"
