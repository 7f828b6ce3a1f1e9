"""Multi-class losses over the full score vector, with analytic gradients.

Two families are supported: one-versus-rest built from a binary surrogate
(square, logistic or hinge), and softmax cross-entropy.  Both operate on
all ``K + 1`` outputs, treating the concealed class as an ordinary output.
Scores are clamped to ``[-clamp, +clamp]`` before evaluation so every
surrogate is bounded on the working domain.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .class_space import score_index


class Surrogate(str, Enum):
    SQUARE = "square"
    LOGISTIC = "logistic"
    HINGE = "hinge"


class LossFamily(str, Enum):
    OVR = "ovr"
    CROSS_ENTROPY = "cross_entropy"


@dataclass(frozen=True)
class LossSpec:
    family: LossFamily = LossFamily.OVR
    surrogate: Surrogate | None = Surrogate.SQUARE
    clamp: float = 50.0

    def __post_init__(self):
        if self.clamp <= 0:
            raise ValueError("clamp must be positive")
        if self.family is LossFamily.OVR and self.surrogate is None:
            raise ValueError("OVR family requires a surrogate")


def square_loss_spec(clamp: float = 50.0) -> LossSpec:
    return LossSpec(LossFamily.OVR, Surrogate.SQUARE, clamp)


def _phi(kind: Surrogate, z):
    if kind is Surrogate.SQUARE:
        return (1.0 - z) ** 2
    if kind is Surrogate.LOGISTIC:
        return np.logaddexp(0.0, -z)
    return np.maximum(0.0, 1.0 - z)


def _dphi(kind: Surrogate, z):
    if kind is Surrogate.SQUARE:
        return -2.0 * (1.0 - z)
    if kind is Surrogate.LOGISTIC:
        # d/dz log(1 + e^{-z}) = -sigmoid(-z)
        return -1.0 / (1.0 + np.exp(z))
    # Subgradient 0 at the hinge point z = 1.
    return np.where(z < 1.0, -1.0, 0.0)


def _check_scores(scores):
    scores = np.asarray(scores, dtype=float)
    if not np.all(np.isfinite(scores)):
        raise ValueError("scores must be finite")
    return scores


def loss_value(spec: LossSpec, scores, targets):
    """Loss of each score vector against its target label.

    ``scores`` is ``(K+1,)`` or ``(n, K+1)``; ``targets`` a label or an
    ``(n,)`` array of labels (1..K or CONCEALED).  Returns a scalar or an
    ``(n,)`` array accordingly.
    """
    scores = _check_scores(scores)
    single = scores.ndim == 1
    z = np.atleast_2d(np.clip(scores, -spec.clamp, spec.clamp))
    n, width = z.shape
    cols = np.atleast_1d(score_index(targets, width - 1))
    if np.any(cols < 0) or np.any(cols >= width):
        raise ValueError("target out of range for score width")
    if spec.family is LossFamily.CROSS_ENTROPY:
        shifted = z - z.max(axis=1, keepdims=True)
        lse = np.log(np.exp(shifted).sum(axis=1))
        out = lse - shifted[np.arange(n), cols]
    else:
        sign = np.full_like(z, -1.0)
        sign[np.arange(n), cols] = 1.0
        out = _phi(spec.surrogate, sign * z).sum(axis=1)
    return float(out[0]) if single else out


def loss_grad(spec: LossSpec, scores, targets):
    """Gradient of :func:`loss_value` with respect to the raw scores."""
    scores = _check_scores(scores)
    single = scores.ndim == 1
    raw = np.atleast_2d(scores)
    z = np.clip(raw, -spec.clamp, spec.clamp)
    n, width = z.shape
    cols = np.atleast_1d(score_index(targets, width - 1))
    if spec.family is LossFamily.CROSS_ENTROPY:
        shifted = z - z.max(axis=1, keepdims=True)
        p = np.exp(shifted)
        p /= p.sum(axis=1, keepdims=True)
        p[np.arange(n), cols] -= 1.0
        grad = p
    else:
        sign = np.full_like(z, -1.0)
        sign[np.arange(n), cols] = 1.0
        grad = _dphi(spec.surrogate, sign * z) * sign
    # Clamped entries are flat in the raw score.
    grad = grad * (np.abs(raw) <= spec.clamp)
    return grad[0] if single else grad


def loss_matrix(spec: LossSpec, scores):
    """Losses of every score row against every possible target.

    Returns ``(n, K+1)`` where column ``j`` holds the loss against the label
    whose score column is ``j`` (classes 1..K, then concealed).
    """
    scores = _check_scores(scores)
    z = np.atleast_2d(np.clip(scores, -spec.clamp, spec.clamp))
    n, width = z.shape
    if spec.family is LossFamily.CROSS_ENTROPY:
        shifted = z - z.max(axis=1, keepdims=True)
        lse = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
        return lse - shifted
    base = _phi(spec.surrogate, -z).sum(axis=1, keepdims=True)
    return base - _phi(spec.surrogate, -z) + _phi(spec.surrogate, z)
