"""Concealed-label dataset generation.

The concealment channel draws, independently per instance, a uniformly
random size-``L`` subset of the unconcealed classes.  The annotation is the
true label when it falls inside the subset and the none label otherwise;
instances of the concealed class are always annotated none.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .class_space import (
    CONCEALED,
    NONE_LABEL,
    ClassSpace,
    validate_concealed_labels,
    validate_true_labels,
)


class DatasetError(ValueError):
    pass


@dataclass
class LabeledData:
    """Fully supervised samples: features plus true labels (1..K or CONCEALED)."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=np.int64)
        if self.x.ndim != 2 or len(self.x) != len(self.y):
            raise DatasetError("x must be (n, d) aligned with y")

    def __len__(self) -> int:
        return len(self.y)

    @property
    def dim(self) -> int:
        return self.x.shape[1]

    def subset(self, idx) -> "LabeledData":
        return LabeledData(self.x[idx], self.y[idx])


@dataclass(frozen=True)
class ConcealedSample:
    """One annotated instance: features, annotation, and the offered label set."""

    x: np.ndarray
    s: int
    sampled_set: frozenset

    def __post_init__(self):
        if self.s == CONCEALED:
            raise DatasetError("the channel never emits the concealed class")
        if self.s != NONE_LABEL and self.s not in self.sampled_set:
            raise DatasetError("observed label must lie in the sampled set")


@dataclass
class ConcealedData:
    """Annotated dataset partitioned by annotation outcome.

    ``s`` holds the annotations (1..K or NONE_LABEL).  ``sampled_sets`` keeps
    the per-instance offered label subsets; they are audit metadata only and
    never consumed by risk or model code.
    """

    x: np.ndarray
    s: np.ndarray
    num_classes: int
    sampled_sets: np.ndarray | None = field(default=None)

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.s = np.asarray(self.s, dtype=np.int64)
        if self.x.ndim != 2 or len(self.x) != len(self.s):
            raise DatasetError("x must be (n, d) aligned with s")
        validate_concealed_labels(self.s, self.num_classes)
        if self.sampled_sets is not None:
            self.sampled_sets = np.asarray(self.sampled_sets, dtype=np.int64)
            if len(self.sampled_sets) != len(self.s):
                raise DatasetError("sampled_sets must align with s")

    def __len__(self) -> int:
        return len(self.s)

    @property
    def dim(self) -> int:
        return self.x.shape[1]

    @property
    def labeled_mask(self) -> np.ndarray:
        return self.s != NONE_LABEL

    @property
    def n_labeled(self) -> int:
        return int(np.count_nonzero(self.labeled_mask))

    @property
    def n_none(self) -> int:
        return len(self.s) - self.n_labeled

    def class_indices(self, label: int) -> np.ndarray:
        """Indices of samples annotated with the given class label."""
        return np.where(self.s == label)[0]

    def subset(self, idx) -> "ConcealedData":
        sets = None if self.sampled_sets is None else self.sampled_sets[idx]
        return ConcealedData(self.x[idx], self.s[idx], self.num_classes, sets)


def draw_label_subsets(n: int, space: ClassSpace, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` independent uniform size-``subset_size`` subsets of 1..K.

    Rows are sorted; all C(K, L) subsets are equiprobable.
    """
    k, l = space.num_classes, space.subset_size
    order = np.argsort(rng.random((n, k)), axis=1)[:, :l] + 1
    return np.sort(order, axis=1)


def annotate_sample(x, y: int, space: ClassSpace, rng: np.random.Generator) -> ConcealedSample:
    """Annotate a single supervised sample through the concealment channel."""
    validate_true_labels([y], space.num_classes)
    subset = draw_label_subsets(1, space, rng)[0]
    s = int(y) if (y != CONCEALED and y in subset) else NONE_LABEL
    return ConcealedSample(np.asarray(x, dtype=float), s, frozenset(int(v) for v in subset))


def annotate_dataset(data: LabeledData, space: ClassSpace, rng) -> ConcealedData:
    """Annotate every sample independently; deterministic given the seed."""
    if len(data) == 0:
        raise DatasetError("empty dataset")
    try:
        validate_true_labels(data.y, space.num_classes)
    except ValueError as e:
        raise DatasetError(f"annotate_dataset: {e}") from e
    rng = np.random.default_rng(rng)
    subsets = draw_label_subsets(len(data), space, rng)
    in_subset = (subsets == data.y[:, None]).any(axis=1)
    s = np.where((data.y != CONCEALED) & in_subset, data.y, NONE_LABEL)
    return ConcealedData(data.x, s, space.num_classes, subsets)


def make_gaussian_mixture(
    n_per_class: int,
    means,
    sigma: float,
    rng,
) -> LabeledData:
    """Isotropic Gaussian blobs, one per class; the last mean is the concealed class."""
    means = np.asarray(means, dtype=float)
    if sigma <= 0:
        raise DatasetError("sigma must be positive")
    if means.ndim != 2 or len(means) < 2:
        raise DatasetError("means must be a (K+1, d) array")
    if len(np.unique(means, axis=0)) != len(means):
        raise DatasetError("means must be distinct")
    rng = np.random.default_rng(rng)
    n_classes_out, d = means.shape
    xs, ys = [], []
    for c in range(n_classes_out):
        label = CONCEALED if c == n_classes_out - 1 else c + 1
        xs.append(means[c] + sigma * rng.standard_normal((n_per_class, d)))
        ys.append(np.full(n_per_class, label, dtype=np.int64))
    if n_per_class == 0:
        return LabeledData(np.empty((0, d)), np.empty(0, dtype=np.int64))
    return LabeledData(np.concatenate(xs), np.concatenate(ys))
