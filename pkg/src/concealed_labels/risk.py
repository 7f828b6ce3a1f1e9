"""Empirical risk estimators over concealed-label data.

The free estimator is the weighted three-term sum

    K/L * mean over all samples of [observed-label loss, labeled samples]
  + K/L * mean over all samples of [concealed-class loss, none samples]
  - (K-L)/L * mean over all samples of [concealed-class loss]

where every mean is taken over the full batch count.  With that shared
normalization the estimator's expectation equals the ordinary supervised
risk exactly, for any batch size and any model.  (Normalizing the first two
terms by their own partition counts instead, as is sometimes done, inflates
them by the inverse partition probabilities and breaks unbiasedness.)

The corrected estimators wrap the possibly-negative bracket
``none_term - subtract_term`` with max{0, .} or |.|.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .class_space import CONCEALED, ClassSpace
from .data import ConcealedData, LabeledData
from .losses import LossSpec, loss_grad, loss_value


class Correction(str, Enum):
    FREE = "free"
    MAX_OPERATOR = "max"
    ABSOLUTE_VALUE = "abs"


class EmptyPartitionError(ValueError):
    """A batch is missing its labeled or its none partition."""

    def __init__(self, partition: str):
        self.partition = partition
        super().__init__(f"batch has no samples in the '{partition}' partition")


@dataclass(frozen=True)
class RiskReport:
    """Decomposed risk values for one evaluation pass."""

    labeled_term: float
    none_term: float
    subtract_term: float
    raw_bracket: float
    total: float
    mode: Correction
    n_labeled: int
    n_none: int
    n_total: int
    score_clamp: float

    @property
    def free_total(self) -> float:
        return self.labeled_term + self.raw_bracket


def _apply_correction(bracket: float, mode: Correction) -> float:
    if mode is Correction.MAX_OPERATOR:
        return max(0.0, bracket)
    if mode is Correction.ABSOLUTE_VALUE:
        return abs(bracket)
    return bracket


def _correction_slope(bracket: float, mode: Correction) -> float:
    # At bracket == 0 both corrections pass the gradient through.
    if mode is Correction.MAX_OPERATOR:
        return 0.0 if bracket < 0 else 1.0
    if mode is Correction.ABSOLUTE_VALUE:
        return -1.0 if bracket < 0 else 1.0
    return 1.0


def _check_batch(batch: ConcealedData, scores, allow_empty: bool):
    scores = np.asarray(scores, dtype=float)
    if scores.shape != (len(batch), batch.num_classes + 1):
        raise ValueError(
            f"scores shape {scores.shape} does not match batch "
            f"({len(batch)}, {batch.num_classes + 1})"
        )
    if len(batch) == 0:
        raise ValueError("empty batch")
    if not allow_empty:
        if batch.n_labeled == 0:
            raise EmptyPartitionError("labeled")
        if batch.n_none == 0:
            raise EmptyPartitionError("none")
    return scores


def empirical_risk(
    batch: ConcealedData,
    scores,
    spec: LossSpec,
    space: ClassSpace,
    mode: Correction = Correction.FREE,
    allow_empty: bool = False,
) -> RiskReport:
    """Evaluate the (optionally corrected) risk estimator on one batch.

    With ``allow_empty`` an absent partition contributes zero, which keeps
    the estimator exact in degenerate channels (e.g. subset_size == K with
    no concealed-class mass, where the none pool is structurally empty).
    """
    scores = _check_batch(batch, scores, allow_empty)
    n = len(batch)
    lab = batch.labeled_mask
    cl_losses = loss_value(spec, scores, np.full(n, CONCEALED))
    labeled_term = 0.0
    if batch.n_labeled:
        labeled_term = space.label_weight * float(
            np.sum(loss_value(spec, scores[lab], batch.s[lab]))
        ) / n
    none_term = space.label_weight * float(np.sum(cl_losses[~lab])) / n
    subtract_term = space.subtract_weight * float(np.sum(cl_losses)) / n
    bracket = none_term - subtract_term
    return RiskReport(
        labeled_term=labeled_term,
        none_term=none_term,
        subtract_term=subtract_term,
        raw_bracket=bracket,
        total=labeled_term + _apply_correction(bracket, mode),
        mode=mode,
        n_labeled=batch.n_labeled,
        n_none=batch.n_none,
        n_total=n,
        score_clamp=spec.clamp,
    )


def per_class_risk(
    batch: ConcealedData,
    scores,
    spec: LossSpec,
    space: ClassSpace,
    allow_empty: bool = False,
) -> np.ndarray:
    """Diagnostic per-label decomposition; entries sum to the free total.

    Entry ``i`` (i < K) is the weighted loss mass of samples annotated with
    class ``i + 1``; the last entry combines the none-pool term and the
    subtracted term for the concealed class.
    """
    scores = _check_batch(batch, scores, allow_empty)
    n = len(batch)
    k = space.num_classes
    out = np.zeros(k + 1)
    lab = batch.labeled_mask
    if batch.n_labeled:
        losses = loss_value(spec, scores[lab], batch.s[lab])
        np.add.at(out, batch.s[lab] - 1, space.label_weight * losses / n)
    cl_losses = loss_value(spec, scores, np.full(n, CONCEALED))
    out[k] = (
        space.label_weight * float(np.sum(cl_losses[~lab])) / n
        - space.subtract_weight * float(np.sum(cl_losses)) / n
    )
    return out


def risk_gradient(
    batch: ConcealedData,
    scores,
    spec: LossSpec,
    space: ClassSpace,
    mode: Correction = Correction.FREE,
    allow_empty: bool = False,
) -> np.ndarray:
    """Gradient of the corrected total with respect to every score entry."""
    scores = _check_batch(batch, scores, allow_empty)
    n = len(batch)
    lab = batch.labeled_mask
    report = empirical_risk(batch, scores, spec, space, mode, allow_empty=True)
    slope = _correction_slope(report.raw_bracket, mode)

    grad = np.zeros_like(scores)
    if batch.n_labeled:
        grad[lab] += (space.label_weight / n) * loss_grad(spec, scores[lab], batch.s[lab])
    cl_grad = loss_grad(spec, scores, np.full(n, CONCEALED))
    bracket_grad = -(space.subtract_weight / n) * cl_grad
    bracket_grad[~lab] += (space.label_weight / n) * cl_grad[~lab]
    grad += slope * bracket_grad
    return grad


def supervised_risk(data: LabeledData, scores, spec: LossSpec) -> float:
    """Plain mean loss against true labels; the reference quantity."""
    if len(data) == 0:
        raise ValueError("empty dataset")
    scores = np.asarray(scores, dtype=float)
    return float(np.mean(loss_value(spec, scores, data.y)))
