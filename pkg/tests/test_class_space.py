from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from concealed_labels import (
    CONCEALED,
    NONE_LABEL,
    ClassSpace,
    ClassSpaceError,
    index_to_label,
    score_index,
)


def test_coefficients_basic():
    space = ClassSpace(10, 1, frozenset({"digit-5"}))
    assert space.label_weight == 10.0
    assert space.subtract_weight == 9.0
    assert space.n_outputs == 11


def test_subset_size_equal_classes_kills_subtract_term():
    space = ClassSpace(10, 10, frozenset({"digit-5"}))
    assert space.subtract_weight == 0.0


@pytest.mark.parametrize(
    "num_classes, subset_size, concealed, message",
    [
        (3, 4, {"x"}, "exceeds"),
        (3, 0, {"x"}, "at least 1"),
        (1, 1, {"x"}, "at least 2"),
        (3, 1, set(), "nonempty"),
    ],
)
def test_validation_errors_are_distinct(num_classes, subset_size, concealed, message):
    with pytest.raises(ClassSpaceError, match=message):
        ClassSpace(num_classes, subset_size, frozenset(concealed))


@given(st.integers(2, 30), st.data())
def test_coefficient_rational_identities(num_classes, data):
    subset_size = data.draw(st.integers(1, num_classes))
    space = ClassSpace(num_classes, subset_size, frozenset({"x"}))
    assert space.label_weight_exact() * subset_size == num_classes
    assert space.label_weight_exact() - 1 == space.subtract_weight_exact()
    assert space.label_weight == float(Fraction(num_classes, subset_size))
    assert abs(space.subtract_weight - (space.label_weight - 1.0)) <= np.finfo(float).eps * abs(
        space.label_weight
    )


@given(st.integers(2, 30), st.data())
def test_round_trip_fields(num_classes, data):
    subset_size = data.draw(st.integers(1, num_classes))
    labels = frozenset({"a", "b"})
    space = ClassSpace(num_classes, subset_size, labels)
    assert (space.num_classes, space.subset_size, space.concealed_source_labels) == (
        num_classes,
        subset_size,
        labels,
    )


def test_score_index_mapping():
    labels = np.array([1, 2, CONCEALED, 3])
    idx = score_index(labels, 3)
    assert list(idx) == [0, 1, 3, 2]
    assert list(index_to_label(idx, 3)) == [1, 2, CONCEALED, 3]


def test_label_constants_disjoint():
    # The none annotation is never a legal true label and the concealed
    # class is never a legal annotation; they must differ.
    assert NONE_LABEL != CONCEALED
    assert NONE_LABEL < 0 <= CONCEALED
