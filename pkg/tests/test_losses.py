import math

import numpy as np
import pytest

from concealed_labels import (
    CONCEALED,
    LossFamily,
    LossSpec,
    Surrogate,
    loss_grad,
    loss_matrix,
    loss_value,
)
from conftest import central_difference, relative_error

SQUARE = LossSpec(LossFamily.OVR, Surrogate.SQUARE)
LOGISTIC = LossSpec(LossFamily.OVR, Surrogate.LOGISTIC)
HINGE = LossSpec(LossFamily.OVR, Surrogate.HINGE)
CE = LossSpec(LossFamily.CROSS_ENTROPY, None)
ALL_SPECS = [SQUARE, LOGISTIC, HINGE, CE]


def test_square_perfectly_consistent_scores():
    # K=1: score vector [class 1, concealed]
    assert loss_value(SQUARE, np.array([1.0, -1.0]), 1) == 0.0


def test_square_zero_scores():
    assert loss_value(SQUARE, np.array([0.0, 0.0]), 1) == 2.0


def test_cross_entropy_uniform_scores():
    scores = np.zeros(10)
    for target in (1, 5, CONCEALED):
        assert loss_value(CE, scores, target) == pytest.approx(math.log(10), rel=1e-12)


def test_square_gradient_hand_value():
    grad = loss_grad(SQUARE, np.array([0.0, 0.0]), 1)
    assert np.allclose(grad, [-2.0, 2.0])


def test_logistic_gradient_hand_value():
    grad = loss_grad(LOGISTIC, np.array([0.0, 0.0]), 1)
    assert np.allclose(grad, [-0.5, 0.5])


@pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: f"{s.family.value}-{s.surrogate}")
def test_gradient_matches_finite_differences(spec):
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(250):
        width = int(rng.integers(2, 6))
        scores = rng.uniform(-3, 3, size=width)
        if spec.surrogate is Surrogate.HINGE:
            # keep away from the hinge kink at z = 1 in every +/- orientation
            while np.any(np.abs(np.abs(scores) - 1.0) < 1e-3):
                scores = rng.uniform(-3, 3, size=width)
        target = int(rng.integers(0, width))  # CONCEALED == 0 included
        target = CONCEALED if target == width - 1 else target + 1
        analytic = loss_grad(spec, scores, target)
        numeric = central_difference(lambda z: loss_value(spec, z, target), scores)
        worst = max(worst, relative_error(analytic, numeric))
    assert worst <= 1e-6


@pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: f"{s.family.value}-{s.surrogate}")
def test_nonnegativity(spec):
    rng = np.random.default_rng(3)
    scores = rng.uniform(-60, 60, size=(500, 4))
    for target in (1, 2, 3, CONCEALED):
        assert np.all(loss_value(spec, scores, np.full(500, target)) >= 0.0)


def test_ovr_separability():
    # Changing a non-target score only moves that score's own term.
    rng = np.random.default_rng(5)
    scores = rng.normal(size=6)
    base = loss_value(SQUARE, scores, 2)
    for j in [0, 2, 3, 4, 5]:
        bumped = scores.copy()
        bumped[j] += 0.37
        delta = loss_value(SQUARE, bumped, 2) - base
        expected = (1 + bumped[j]) ** 2 - (1 + scores[j]) ** 2
        assert delta == pytest.approx(expected, rel=1e-12)


def test_bounded_on_clamped_domain():
    spec = LossSpec(LossFamily.OVR, Surrogate.SQUARE, clamp=50.0)
    scores = np.array([[1e6, -1e6, 3.0]])
    value = loss_value(spec, scores, np.array([1]))
    # clamp makes the supremum finite: phi bounded by (1 + clamp)^2 per term
    assert np.isfinite(value) and value <= 3 * (1 + 50.0) ** 2


def test_clamped_scores_have_zero_gradient():
    spec = LossSpec(LossFamily.OVR, Surrogate.SQUARE, clamp=5.0)
    grad = loss_grad(spec, np.array([10.0, 0.0]), 1)
    assert grad[0] == 0.0 and grad[1] != 0.0


def test_non_finite_scores_rejected():
    with pytest.raises(ValueError, match="finite"):
        loss_value(SQUARE, np.array([np.nan, 0.0]), 1)
    with pytest.raises(ValueError, match="finite"):
        loss_grad(SQUARE, np.array([np.inf, 0.0]), 1)


def test_hinge_subgradient_zero_at_kink():
    assert loss_grad(HINGE, np.array([1.0, -1.0]), 1)[0] == 0.0


def test_loss_matrix_matches_loss_value():
    rng = np.random.default_rng(11)
    scores = rng.normal(size=(8, 5))
    for spec in ALL_SPECS:
        matrix = loss_matrix(spec, scores)
        for col in range(5):
            label = CONCEALED if col == 4 else col + 1
            expected = loss_value(spec, scores, np.full(8, label))
            assert np.allclose(matrix[:, col], expected, atol=1e-12)
