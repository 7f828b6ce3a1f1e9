"""IDX image/label file ingestion (big-endian magic + dimension headers).

Pixel bytes are scaled to [0, 1] by dividing by 255.  Original label bytes
are remapped through a :class:`ClassSpace`: identifiers listed in
``concealed_source_labels`` collapse to the concealed class, the remaining
identifiers become classes 1..K in ascending original order.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .class_space import CONCEALED, ClassSpace
from .data import LabeledData

IMAGE_MAGIC = 2051
LABEL_MAGIC = 2049


class IdxFormatError(ValueError):
    pass


def _read_exact(f, count: int, what: str) -> bytes:
    buf = f.read(count)
    if len(buf) != count:
        raise IdxFormatError(f"truncated file: expected {count} bytes of {what}")
    return buf


def read_idx_images(path) -> np.ndarray:
    """Read an IDX image file into an (n, rows*cols) float array in [0, 1]."""
    with open(path, "rb") as f:
        magic, n, rows, cols = struct.unpack(">IIII", _read_exact(f, 16, "image header"))
        if magic != IMAGE_MAGIC:
            raise IdxFormatError(f"bad image magic {magic}, expected {IMAGE_MAGIC}")
        raw = _read_exact(f, n * rows * cols, "pixels")
    pixels = np.frombuffer(raw, dtype=np.uint8).reshape(n, rows * cols)
    return pixels.astype(float) / 255.0


def read_idx_labels(path) -> np.ndarray:
    """Read an IDX label file into an (n,) uint8 array of original labels."""
    with open(path, "rb") as f:
        magic, n = struct.unpack(">II", _read_exact(f, 8, "label header"))
        if magic != LABEL_MAGIC:
            raise IdxFormatError(f"bad label magic {magic}, expected {LABEL_MAGIC}")
        raw = _read_exact(f, n, "labels")
    return np.frombuffer(raw, dtype=np.uint8).copy()


def remap_labels(raw_labels: np.ndarray, space: ClassSpace) -> np.ndarray:
    """Map original label identifiers onto {CONCEALED} | {1..K}."""
    concealed = {int(v) for v in space.concealed_source_labels}
    present = sorted(set(int(v) for v in np.unique(raw_labels)) - concealed)
    if len(present) != space.num_classes:
        raise IdxFormatError(
            f"label file has {len(present)} unconcealed identifiers, "
            f"space expects {space.num_classes}"
        )
    table = {v: i + 1 for i, v in enumerate(present)}
    table.update({v: CONCEALED for v in concealed})
    return np.array([table[int(v)] for v in raw_labels], dtype=np.int64)


def load_idx_pair(images_path, labels_path, space: ClassSpace) -> LabeledData:
    """Load an (images, labels) IDX pair as a supervised dataset."""
    images = read_idx_images(images_path)
    raw = read_idx_labels(labels_path)
    if len(images) != len(raw):
        raise IdxFormatError(
            f"count mismatch: {len(images)} images vs {len(raw)} labels"
        )
    return LabeledData(images, remap_labels(raw, space))


def write_idx_images(path, pixels: np.ndarray, rows: int, cols: int) -> None:
    """Write uint8 pixel rows as an IDX image file (used for fixtures/demos)."""
    pixels = np.asarray(pixels, dtype=np.uint8)
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", IMAGE_MAGIC, len(pixels), rows, cols))
        f.write(pixels.tobytes())


def write_idx_labels(path, labels: np.ndarray) -> None:
    labels = np.asarray(labels, dtype=np.uint8)
    with open(path, "wb") as f:
        f.write(struct.pack(">II", LABEL_MAGIC, len(labels)))
        f.write(labels.tobytes())


def find_mnist_pair(directory) -> tuple[Path, Path] | None:
    """Locate a conventional MNIST train pair under ``directory``, if any."""
    directory = Path(directory)
    for img_name, lab_name in [
        ("train-images-idx3-ubyte", "train-labels-idx1-ubyte"),
        ("train-images.idx3-ubyte", "train-labels.idx1-ubyte"),
    ]:
        img, lab = directory / img_name, directory / lab_name
        if img.exists() and lab.exists():
            return img, lab
    return None
