"""Label universe for learning from concealed labels.

Labels use a fixed integer encoding throughout the package:

* ordinary (unconcealed) classes are ``1 .. num_classes``,
* ``CONCEALED`` (0) is the single collapsed class for all sensitive source
  labels; it is a legal true label and prediction but never an annotation,
* ``NONE_LABEL`` (-1) is the "none" annotation emitted by the concealment
  channel; it is never a legal true label.

Score vectors have ``num_classes + 1`` entries ordered
``[class 1, ..., class K, concealed]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

CONCEALED = 0
NONE_LABEL = -1


class ClassSpaceError(ValueError):
    """Invalid label-universe configuration."""


@dataclass(frozen=True)
class ClassSpace:
    """Validated (num_classes, subset_size) configuration.

    Parameters
    ----------
    num_classes:
        Number of unconcealed classes shown to annotators (at least 2).
    subset_size:
        Number of labels in the random label set offered per instance,
        between 1 and ``num_classes``.
    concealed_source_labels:
        Original-dataset identifiers that are collapsed into the concealed
        class before anything downstream sees them.
    """

    num_classes: int
    subset_size: int
    concealed_source_labels: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        k, l = self.num_classes, self.subset_size
        if not isinstance(k, (int, np.integer)) or not isinstance(l, (int, np.integer)):
            raise ClassSpaceError("num_classes and subset_size must be integers")
        if k < 2:
            raise ClassSpaceError(f"num_classes must be at least 2, got {k}")
        if l < 1:
            raise ClassSpaceError(f"subset_size must be at least 1, got {l}")
        if l > k:
            raise ClassSpaceError(
                f"subset_size exceeds num_classes ({l} > {k})"
            )
        if not self.concealed_source_labels:
            raise ClassSpaceError("concealed_source_labels must be nonempty")
        object.__setattr__(
            self, "concealed_source_labels", frozenset(self.concealed_source_labels)
        )
        # Cached risk coefficients, evaluated from exact rationals.
        object.__setattr__(self, "_label_weight", float(Fraction(k, l)))
        object.__setattr__(self, "_subtract_weight", float(Fraction(k - l, l)))

    @property
    def n_outputs(self) -> int:
        """Score-vector length: the unconcealed classes plus the concealed one."""
        return self.num_classes + 1

    @property
    def label_weight(self) -> float:
        """Multiplier on observed-label and none-pool loss terms."""
        return self._label_weight

    @property
    def subtract_weight(self) -> float:
        """Multiplier on the subtracted whole-sample concealed-loss term."""
        return self._subtract_weight

    def label_weight_exact(self) -> Fraction:
        return Fraction(self.num_classes, self.subset_size)

    def subtract_weight_exact(self) -> Fraction:
        return Fraction(self.num_classes - self.subset_size, self.subset_size)


def score_index(labels, num_classes: int):
    """Map true labels (1..K or CONCEALED) to score-vector column indices."""
    labels = np.asarray(labels)
    return np.where(labels == CONCEALED, num_classes, labels - 1)


def index_to_label(indices, num_classes: int):
    """Inverse of :func:`score_index`."""
    indices = np.asarray(indices)
    return np.where(indices == num_classes, CONCEALED, indices + 1)


def validate_true_labels(labels, num_classes: int) -> None:
    """Raise if any entry is not CONCEALED or an integer in 1..num_classes."""
    labels = np.asarray(labels)
    ok = (labels == CONCEALED) | ((labels >= 1) & (labels <= num_classes))
    if not np.all(ok):
        bad = int(np.argmax(~ok))
        raise ClassSpaceError(
            f"invalid true label {labels.flat[bad]} at index {bad}"
        )


def validate_concealed_labels(labels, num_classes: int) -> None:
    """Raise if any entry is not NONE_LABEL or an integer in 1..num_classes."""
    labels = np.asarray(labels)
    ok = (labels == NONE_LABEL) | ((labels >= 1) & (labels <= num_classes))
    if not np.all(ok):
        bad = int(np.argmax(~ok))
        raise ClassSpaceError(
            f"invalid concealed label {labels.flat[bad]} at index {bad}"
        )
