import struct

import numpy as np
import pytest

from concealed_labels import CONCEALED, ClassSpace, IdxFormatError, load_idx_pair
from concealed_labels.idx import (
    read_idx_images,
    read_idx_labels,
    write_idx_images,
    write_idx_labels,
)


@pytest.fixture
def idx_pair(tmp_path):
    rng = np.random.default_rng(0)
    pixels = rng.integers(0, 256, size=(30, 16), dtype=np.uint8)
    labels = np.repeat(np.arange(10), 3).astype(np.uint8)
    img, lab = tmp_path / "imgs", tmp_path / "labs"
    write_idx_images(img, pixels, 4, 4)
    write_idx_labels(lab, labels)
    return img, lab, pixels, labels


def test_round_trip(idx_pair):
    img, lab, pixels, labels = idx_pair
    assert np.array_equal(read_idx_images(img), pixels.astype(float) / 255.0)
    assert np.array_equal(read_idx_labels(lab), labels)


def test_load_pair_maps_concealed_label(idx_pair):
    img, lab, _, labels = idx_pair
    space = ClassSpace(9, 1, frozenset({5}))
    data = load_idx_pair(img, lab, space)
    assert data.dim == 16
    # original label 5 collapses; remaining ascend to 1..9
    assert np.all(data.y[labels == 5] == CONCEALED)
    assert np.all(data.y[labels == 0] == 1)
    assert np.all(data.y[labels == 6] == 6)  # 0,1,2,3,4 -> 1..5, then 6 -> 6
    assert np.all(data.y[labels == 9] == 9)


def test_pixels_scaled_to_unit_interval(idx_pair):
    img, lab, _, _ = idx_pair
    data = load_idx_pair(img, lab, ClassSpace(9, 1, frozenset({5})))
    assert data.x.min() >= 0.0 and data.x.max() <= 1.0


def test_bad_image_magic(tmp_path):
    path = tmp_path / "bad"
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", 2049, 1, 2, 2))
        f.write(bytes(4))
    with pytest.raises(IdxFormatError, match="bad image magic"):
        read_idx_images(path)


def test_bad_label_magic(tmp_path):
    path = tmp_path / "bad"
    with open(path, "wb") as f:
        f.write(struct.pack(">II", 2051, 1))
        f.write(bytes(1))
    with pytest.raises(IdxFormatError, match="bad label magic"):
        read_idx_labels(path)


def test_truncated_image_file(tmp_path):
    path = tmp_path / "trunc"
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", 2051, 10, 4, 4))
        f.write(bytes(7))  # far fewer than 160 pixels
    with pytest.raises(IdxFormatError, match="truncated"):
        read_idx_images(path)


def test_count_mismatch(tmp_path, idx_pair):
    img, _, _, _ = idx_pair
    short = tmp_path / "short"
    write_idx_labels(short, np.arange(10, dtype=np.uint8))
    with pytest.raises(IdxFormatError, match="count mismatch"):
        load_idx_pair(img, short, ClassSpace(9, 1, frozenset({5})))


def test_wrong_class_count_rejected(idx_pair):
    img, lab, _, _ = idx_pair
    with pytest.raises(IdxFormatError, match="unconcealed identifiers"):
        load_idx_pair(img, lab, ClassSpace(4, 1, frozenset({5})))


def test_digits_fixture_loads(digits_idx):
    space = ClassSpace(9, 1, frozenset({5}))
    train = load_idx_pair(digits_idx["train_images"], digits_idx["train_labels"], space)
    test = load_idx_pair(digits_idx["test_images"], digits_idx["test_labels"], space)
    assert train.dim == test.dim
    assert set(np.unique(train.y)) == set(range(10))  # CONCEALED plus 1..9
    assert len(train) > len(test) > 0
