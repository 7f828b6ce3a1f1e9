"""Desk-scale handwritten-digits dataset materialized as IDX files.

Uses scikit-learn's bundled 8x8 digits (a real handwritten-digit corpus that
ships offline) rescaled to byte range, so the full IDX ingestion path gets
exercised end to end.  Real MNIST IDX files are used instead when present,
either under ``CONCEALED_LABELS_MNIST_DIR`` or a ``data/mnist`` directory.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from .idx import write_idx_images, write_idx_labels

TRAIN_FILES = ("train-images-idx3-ubyte", "train-labels-idx1-ubyte")
TEST_FILES = ("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte")


def mnist_dir() -> Path | None:
    """Directory holding real MNIST IDX files, if the environment has one."""
    candidates = []
    env = os.environ.get("CONCEALED_LABELS_MNIST_DIR")
    if env:
        candidates.append(Path(env))
    candidates.append(Path("data") / "mnist")
    for directory in candidates:
        if all((directory / name).exists() for name in TRAIN_FILES + TEST_FILES):
            return directory
    return None


def write_digits_idx(directory, test_fraction: float = 0.28, seed: int = 2024) -> dict:
    """Write the bundled digits corpus as an IDX train/test pair.

    The split is stratified per digit and deterministic given the seed.
    Returns the four file paths plus bookkeeping counts.
    """
    from sklearn.datasets import load_digits

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    bunch = load_digits()
    # 0..16 pixel range widened to bytes so IDX loading lands back in [0, 1].
    pixels = np.round(bunch.data * (255.0 / 16.0)).astype(np.uint8)
    labels = bunch.target.astype(np.uint8)

    rng = np.random.default_rng(seed)
    train_idx, test_idx = [], []
    for digit in range(10):
        idx = rng.permutation(np.where(labels == digit)[0])
        n_test = int(round(test_fraction * len(idx)))
        test_idx.extend(idx[:n_test])
        train_idx.extend(idx[n_test:])
    train_idx = rng.permutation(np.array(train_idx))
    test_idx = rng.permutation(np.array(test_idx))

    paths = {}
    for tag, idx, (img_name, lab_name) in (
        ("train", train_idx, TRAIN_FILES),
        ("test", test_idx, TEST_FILES),
    ):
        img_path, lab_path = directory / img_name, directory / lab_name
        write_idx_images(img_path, pixels[idx], 8, 8)
        write_idx_labels(lab_path, labels[idx])
        paths[f"{tag}_images"] = str(img_path)
        paths[f"{tag}_labels"] = str(lab_path)
    paths["n_train"] = len(train_idx)
    paths["n_test"] = len(test_idx)
    paths["source"] = "sklearn-digits"
    return paths


def desk_digits_paths(directory) -> dict:
    """IDX paths for desk-scale experiments: real MNIST if present, else digits."""
    real = mnist_dir()
    if real is not None:
        return {
            "train_images": str(real / TRAIN_FILES[0]),
            "train_labels": str(real / TRAIN_FILES[1]),
            "test_images": str(real / TEST_FILES[0]),
            "test_labels": str(real / TEST_FILES[1]),
            "source": "mnist",
        }
    return write_digits_idx(directory)
