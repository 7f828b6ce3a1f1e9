import numpy as np
import pytest

from concealed_labels.config import (
    ConfigError,
    ExperimentConfig,
    dump_config,
    load_config,
    parse_config,
)
from concealed_labels.losses import LossFamily, Surrogate
from concealed_labels.risk import Correction

GOOD = """
# gaussian toy
dataset.kind = gaussian
dataset.n_per_class = 40
dataset.centers = 0 0; 4 0; 0 4
dataset.sigma = 0.7
class_space.num_classes = 2
class_space.subset_size = 1
class_space.concealed_source_labels = secret
loss.family = ovr
loss.surrogate = square
loss.clamp = 50.0
risk.correction = free
model.kind = linear
optimizer.kind = adam
optimizer.weight_decay = 0.0
train.epochs = 3
train.batch_size = 16
train.seed = 5
train.trials = 2
train.lr_grid = 0.05, 0.01
train.validation_fraction = 0.1
"""


def test_parse_good_config():
    config = parse_config(GOOD)
    assert config.train_trials == 2
    assert config.lr_grid() == [0.05, 0.01]
    assert np.array_equal(config.centers(), [[0, 0], [4, 0], [0, 4]])
    space = config.space()
    assert space.num_classes == 2 and space.subset_size == 1
    assert space.concealed_source_labels == frozenset({"secret"})
    spec = config.loss_spec()
    assert spec.family is LossFamily.OVR and spec.surrogate is Surrogate.SQUARE
    assert config.correction() is Correction.FREE


def test_unknown_key_is_error():
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config("train.epocs = 3\n")


def test_duplicate_key_is_error():
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config("train.epochs = 3\ntrain.epochs = 4\n")


def test_bad_value_reports_line():
    with pytest.raises(ConfigError, match="line 1"):
        parse_config("train.epochs = many\n")


def test_malformed_line_is_error():
    with pytest.raises(ConfigError, match="key = value"):
        parse_config("just some words\n")


def test_validation_fraction_bounds():
    with pytest.raises(ConfigError, match="validation_fraction"):
        parse_config("train.validation_fraction = 1.5\n")


def test_missing_idx_files_detected(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text("dataset.kind = idx\ndataset.train_images = /nope\n")
    with pytest.raises(ConfigError, match="file not found"):
        load_config(path)


def test_round_trip_dump_parse():
    config = parse_config(GOOD)
    assert parse_config(dump_config(config)) == config


def test_defaults_valid():
    config = ExperimentConfig()
    assert config.space().num_classes == 2
    assert config.loss_spec().clamp == 50.0
