"""Exact verification engine on small finite distributions.

Represents a distribution over finitely many feature atoms with per-atom
class posteriors, pushes it through the concealment channel analytically,
inverts the channel in closed form, and evaluates both the ordinary
supervised risk and its concealed-label counterpart by exact enumeration.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .class_space import CONCEALED, ClassSpace
from .data import LabeledData, annotate_dataset
from .losses import LossSpec, loss_matrix
from .risk import Correction, EmptyPartitionError, empirical_risk

_SUM_TOL = 1e-12
_CLIP_TOL = 1e-9


class InvalidChannelError(ValueError):
    """Concealed-label probabilities inconsistent with the channel model."""


@dataclass
class FiniteDistribution:
    """Atoms (M, d), atom probabilities (M,), posteriors (M, K+1).

    Posterior columns are ordered [class 1, ..., class K, concealed].
    """

    xs: np.ndarray
    probs: np.ndarray
    posteriors: np.ndarray

    def __post_init__(self):
        self.xs = np.atleast_2d(np.asarray(self.xs, dtype=float))
        self.probs = np.asarray(self.probs, dtype=float)
        self.posteriors = np.asarray(self.posteriors, dtype=float)
        if len(self.xs) != len(self.probs) or len(self.xs) != len(self.posteriors):
            raise ValueError("atoms, probs and posteriors must align")
        if np.any(self.probs < 0) or abs(self.probs.sum() - 1.0) > _SUM_TOL:
            raise ValueError("atom probabilities must be nonnegative and sum to 1")
        if np.any(self.posteriors < 0):
            raise ValueError("posteriors must be nonnegative")
        if np.max(np.abs(self.posteriors.sum(axis=1) - 1.0)) > _SUM_TOL:
            raise ValueError("each posterior row must sum to 1")

    @property
    def n_atoms(self) -> int:
        return len(self.probs)

    @property
    def num_classes(self) -> int:
        return self.posteriors.shape[1] - 1

    def sample(self, n: int, rng) -> LabeledData:
        """Draw n supervised samples (atom, then label from its posterior)."""
        rng = np.random.default_rng(rng)
        atoms = rng.choice(self.n_atoms, size=n, p=self.probs)
        cdf = np.cumsum(self.posteriors[atoms], axis=1)
        cols = np.minimum(
            (rng.random(n)[:, None] > cdf).sum(axis=1), self.num_classes
        )
        y = np.where(cols == self.num_classes, CONCEALED, cols + 1)
        return LabeledData(self.xs[atoms], y)

    def bayes_scores(self) -> np.ndarray:
        """Posterior rows themselves; argmax gives the Bayes classifier."""
        return self.posteriors.copy()


def random_distribution(space: ClassSpace, n_atoms: int, dim: int, rng) -> FiniteDistribution:
    """Random Dirichlet atoms/posteriors; handy for randomized identity checks."""
    rng = np.random.default_rng(rng)
    xs = rng.normal(size=(n_atoms, dim))
    probs = rng.dirichlet(np.ones(n_atoms))
    posteriors = rng.dirichlet(np.ones(space.num_classes + 1), size=n_atoms)
    return FiniteDistribution(xs, probs, posteriors)


@dataclass
class ChannelDistribution:
    """Per-atom annotation probabilities, columns [s=1, ..., s=K, s=none]."""

    probs: np.ndarray

    def __post_init__(self):
        self.probs = np.atleast_2d(np.asarray(self.probs, dtype=float))
        if np.max(np.abs(self.probs.sum(axis=1) - 1.0)) > _SUM_TOL:
            raise ValueError("each channel row must sum to 1")

    @property
    def num_classes(self) -> int:
        return self.probs.shape[1] - 1


def apply_channel(dist: FiniteDistribution, space: ClassSpace) -> ChannelDistribution:
    """Push true-label posteriors through the concealment channel."""
    k, l = space.num_classes, space.subset_size
    if dist.num_classes != k:
        raise ValueError("distribution and space disagree on class count")
    post = dist.posteriors
    out = np.empty_like(post)
    out[:, :k] = (l / k) * post[:, :k]
    out[:, k] = ((k - l) / k) * post[:, :k].sum(axis=1) + post[:, k]
    return ChannelDistribution(out)


def invert_channel(chan: ChannelDistribution, space: ClassSpace) -> np.ndarray:
    """Closed-form recovery of true-label posteriors from channel posteriors.

    Raises :class:`InvalidChannelError` when any recovered entry falls
    outside [0, 1] by more than the clip tolerance; smaller excursions are
    clipped and renormalized with a warning.
    """
    k, l = space.num_classes, space.subset_size
    if chan.num_classes != k:
        raise ValueError("channel and space disagree on class count")
    p = chan.probs
    post = np.empty_like(p)
    post[:, :k] = (k / l) * p[:, :k]
    post[:, k] = (k / l) * p[:, k] - (k - l) / l
    low, high = post.min(), post.max()
    if low < -_CLIP_TOL or high > 1.0 + _CLIP_TOL:
        raise InvalidChannelError(
            f"recovered posterior entries in [{low:.3e}, {high:.3e}] "
            "are inconsistent with the concealment channel"
        )
    if low < 0.0 or high > 1.0:
        warnings.warn(
            "clipping recovered posteriors within tolerance", stacklevel=2
        )
        post = np.clip(post, 0.0, 1.0)
        post /= post.sum(axis=1, keepdims=True)
    return post


def _atom_scores(dist: FiniteDistribution, model) -> np.ndarray:
    # `model` may be a ScoreModel or a precomputed (M, K+1) score array.
    if hasattr(model, "forward"):
        return model.forward(dist.xs)
    return np.atleast_2d(np.asarray(model, dtype=float))


def exact_supervised_risk(dist: FiniteDistribution, model, spec: LossSpec) -> float:
    """Exact ordinary risk by enumeration over atoms and labels."""
    losses = loss_matrix(spec, _atom_scores(dist, model))
    return float(np.sum(dist.probs[:, None] * dist.posteriors * losses))


def exact_cl_risk(dist: FiniteDistribution, space: ClassSpace, model, spec: LossSpec) -> float:
    """Exact concealed-label risk; equals the supervised risk for any model."""
    k = space.num_classes
    chan = apply_channel(dist, space).probs
    losses = loss_matrix(spec, _atom_scores(dist, model))
    labeled = space.label_weight * np.sum(
        dist.probs[:, None] * chan[:, :k] * losses[:, :k]
    )
    none = space.label_weight * np.sum(dist.probs * chan[:, k] * losses[:, k])
    subtract = space.subtract_weight * np.sum(dist.probs * losses[:, k])
    return float(labeled + none - subtract)


@dataclass(frozen=True)
class MonteCarloResult:
    mean: float
    std_error: float
    exact: float
    replicates: int
    n_redrawn: int

    @property
    def within_3se(self) -> bool:
        return abs(self.mean - self.exact) <= 3.0 * self.std_error


def monte_carlo_unbiasedness(
    dist: FiniteDistribution,
    space: ClassSpace,
    model,
    spec: LossSpec,
    n_per_replicate: int,
    replicates: int,
    seed: int,
    max_redraws: int = 100,
) -> MonteCarloResult:
    """Sample datasets, annotate, and compare the free-risk mean to the exact value.

    Replicates that land with an empty partition are redrawn and counted,
    unless the partition is structurally empty under the channel (then the
    empty term legitimately contributes zero).
    """
    if replicates < 30:
        raise ValueError("need at least 30 replicates")
    chan = apply_channel(dist, space).probs
    p_none = float(np.sum(dist.probs * chan[:, space.num_classes]))
    p_labeled = 1.0 - p_none
    structurally_empty = p_none == 0.0 or p_labeled == 0.0

    rng = np.random.default_rng(seed)
    values = np.empty(replicates)
    n_redrawn = 0
    for r in range(replicates):
        for attempt in range(max_redraws + 1):
            labeled = dist.sample(n_per_replicate, rng)
            concealed = annotate_dataset(labeled, space, rng)
            try:
                report = empirical_risk(
                    concealed,
                    model.forward(concealed.x),
                    spec,
                    space,
                    Correction.FREE,
                    allow_empty=structurally_empty,
                )
            except EmptyPartitionError:
                n_redrawn += 1
                continue
            values[r] = report.total
            break
        else:
            raise RuntimeError("exceeded redraw budget for empty partitions")
    exact = exact_cl_risk(dist, space, model, spec)
    se = float(values.std(ddof=1) / np.sqrt(replicates))
    return MonteCarloResult(float(values.mean()), se, exact, replicates, n_redrawn)


def square_ovr_optimal_scores(dist: FiniteDistribution) -> np.ndarray:
    """Pointwise minimizer of the square-surrogate OVR risk: 2 * posterior - 1."""
    return 2.0 * dist.posteriors - 1.0


def exact_error_rate(dist: FiniteDistribution, scores: np.ndarray) -> float:
    """Exact 0-1 risk of argmax predictions on the enumerated distribution."""
    cols = np.argmax(np.atleast_2d(scores), axis=1)
    correct = dist.posteriors[np.arange(dist.n_atoms), cols]
    return float(1.0 - np.sum(dist.probs * correct))


def bayes_error_rate(dist: FiniteDistribution) -> float:
    return float(1.0 - np.sum(dist.probs * dist.posteriors.max(axis=1)))
