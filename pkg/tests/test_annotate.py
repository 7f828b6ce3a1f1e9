from itertools import combinations

import numpy as np
import pytest
from scipy import stats

from concealed_labels import (
    CONCEALED,
    NONE_LABEL,
    ClassSpace,
    DatasetError,
    LabeledData,
    annotate_dataset,
    annotate_sample,
    draw_label_subsets,
    make_gaussian_mixture,
)

SPACE_10_1 = ClassSpace(10, 1, frozenset({"digit-5"}))


def test_concealed_class_always_annotated_none():
    rng = np.random.default_rng(0)
    for _ in range(200):
        sample = annotate_sample(np.zeros(2), CONCEALED, SPACE_10_1, rng)
        assert sample.s == NONE_LABEL


def test_full_subset_always_reveals_label():
    space = ClassSpace(4, 4, frozenset({"x"}))
    rng = np.random.default_rng(0)
    for y in (1, 2, 3, 4):
        sample = annotate_sample(np.zeros(1), y, space, rng)
        assert sample.s == y
        assert sample.sampled_set == frozenset({1, 2, 3, 4})


def test_none_frequency_matches_channel():
    # P(s = none | y unconcealed) = (K - L) / K, here 0.9
    n = 100_000
    data = LabeledData(np.zeros((n, 1)), np.full(n, 3))
    concealed = annotate_dataset(data, SPACE_10_1, 123)
    freq = np.mean(concealed.s == NONE_LABEL)
    assert freq == pytest.approx(0.9, abs=0.01)


def test_never_annotated_with_wrong_class():
    n = 50_000
    data = LabeledData(np.zeros((n, 1)), np.full(n, 3))
    concealed = annotate_dataset(data, SPACE_10_1, 7)
    observed = set(np.unique(concealed.s))
    assert observed <= {3, NONE_LABEL}
    kept = np.mean(concealed.s == 3)
    se = np.sqrt(0.1 * 0.9 / n)
    assert abs(kept - 0.1) <= 3 * se


def test_partition_counts_sum():
    rng = np.random.default_rng(5)
    y = rng.integers(0, 11, size=1000)  # 0 == CONCEALED
    data = LabeledData(rng.normal(size=(1000, 3)), y)
    concealed = annotate_dataset(data, SPACE_10_1, 9)
    assert concealed.n_labeled + concealed.n_none == 1000
    for label in range(1, 11):
        idx = concealed.class_indices(label)
        assert np.all(concealed.s[idx] == label)


def test_all_concealed_input_gives_all_none():
    data = LabeledData(np.zeros((100, 2)), np.full(100, CONCEALED))
    concealed = annotate_dataset(data, SPACE_10_1, 1)
    assert concealed.n_none == 100 and concealed.n_labeled == 0


def test_labeled_fraction_monte_carlo():
    # uniform y over 1..10, no concealed class: P(s = y) = L / K = 0.1
    n = 100_000
    rng = np.random.default_rng(11)
    data = LabeledData(np.zeros((n, 1)), rng.integers(1, 11, size=n))
    concealed = annotate_dataset(data, SPACE_10_1, 13)
    assert concealed.n_labeled / n == pytest.approx(0.1, abs=0.01)


def test_empty_dataset_rejected():
    data = LabeledData(np.zeros((0, 2)), np.zeros(0, dtype=int))
    with pytest.raises(DatasetError, match="empty dataset"):
        annotate_dataset(data, SPACE_10_1, 0)


def test_invalid_label_reported_with_index():
    data = LabeledData(np.zeros((3, 1)), np.array([1, 99, 2]))
    with pytest.raises(DatasetError, match="index 1"):
        annotate_dataset(data, SPACE_10_1, 0)


def test_subset_membership_invariant():
    rng = np.random.default_rng(21)
    data = LabeledData(np.zeros((5000, 1)), rng.integers(1, 11, size=5000))
    concealed = annotate_dataset(data, SPACE_10_1, 17)
    labeled = concealed.labeled_mask
    inside = (concealed.sampled_sets == concealed.s[:, None]).any(axis=1)
    assert np.all(inside[labeled])
    assert np.all(~inside[~labeled] | (concealed.s[~labeled] == NONE_LABEL))


def test_subset_sizes_and_range():
    space = ClassSpace(7, 3, frozenset({"x"}))
    subsets = draw_label_subsets(1000, space, np.random.default_rng(3))
    assert subsets.shape == (1000, 3)
    assert np.all((subsets >= 1) & (subsets <= 7))
    # rows sorted strictly: no repeats within a subset
    assert np.all(np.diff(subsets, axis=1) > 0)


@pytest.mark.parametrize("num_classes,subset_size", [(4, 2), (5, 2), (5, 3)])
def test_subset_uniformity_chi_square(num_classes, subset_size):
    space = ClassSpace(num_classes, subset_size, frozenset({"x"}))
    subsets = draw_label_subsets(100_000, space, np.random.default_rng(31))
    keys = [tuple(row) for row in subsets]
    support = list(combinations(range(1, num_classes + 1), subset_size))
    counts = np.array([keys.count(s) for s in support])
    assert counts.sum() == 100_000
    _, p_value = stats.chisquare(counts)
    assert p_value > 0.01


def test_annotation_deterministic_given_seed():
    rng = np.random.default_rng(5)
    data = LabeledData(rng.normal(size=(500, 2)), rng.integers(0, 11, size=500))
    a = annotate_dataset(data, SPACE_10_1, 42)
    b = annotate_dataset(data, SPACE_10_1, 42)
    assert np.array_equal(a.s, b.s)
    assert np.array_equal(a.sampled_sets, b.sampled_sets)


def test_gaussian_mixture_shapes_and_labels():
    means = np.array([[0.0, 0.0], [4.0, 0.0], [0.0, 4.0]])
    data = make_gaussian_mixture(50, means, 0.5, 7)
    assert len(data) == 150
    assert set(np.unique(data.y)) == {1, 2, CONCEALED}


def test_gaussian_mixture_empty():
    means = np.array([[0.0], [4.0]])
    data = make_gaussian_mixture(0, means, 1.0, 0)
    assert len(data) == 0


def test_gaussian_mixture_reproducible():
    means = np.array([[0.0, 0.0], [4.0, 0.0], [0.0, 4.0]])
    a = make_gaussian_mixture(20, means, 0.3, 99)
    b = make_gaussian_mixture(20, means, 0.3, 99)
    assert np.array_equal(a.x, b.x) and np.array_equal(a.y, b.y)


def test_gaussian_mixture_rejects_bad_sigma():
    with pytest.raises(DatasetError, match="sigma"):
        make_gaussian_mixture(5, np.array([[0.0], [1.0]]), 0.0, 0)


def test_gaussian_mixture_separable_sanity(tmp_path):
    # well-separated blobs: a supervised linear model nails the training set
    from concealed_labels import Adam, LinearModel, LossSpec, evaluate, train_supervised

    means = np.array([[0.0, 0.0], [8.0, 0.0], [0.0, 8.0]])
    data = make_gaussian_mixture(50, means, 0.3, 3)
    model = LinearModel(2, 3, rng=0)
    model, _ = train_supervised(model, data, LossSpec(), Adam(0.05), 60, 32, 1)
    accuracy, _ = evaluate(model, data)
    assert accuracy >= 0.99
