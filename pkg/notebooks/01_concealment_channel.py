"""The concealment channel and its closed-form inversion.

An annotator is shown a random subset of L of the K unconcealed classes.
The annotation is the true label when it lands in the subset, otherwise
"none"; instances of the concealed class are always annotated none.  This
script draws from the channel, compares frequencies against the analytic
channel distribution, and recovers the true posteriors by inversion.
"""

import numpy as np

from concealed_labels import (
    CONCEALED,
    NONE_LABEL,
    ClassSpace,
    FiniteDistribution,
    LabeledData,
    annotate_dataset,
    apply_channel,
    invert_channel,
)

space = ClassSpace(num_classes=4, subset_size=2, concealed_source_labels={"smoking"})
print(f"classes: {space.num_classes} + concealed, subset size {space.subset_size}")
print(f"label weight K/L = {space.label_weight}, subtract weight (K-L)/L = {space.subtract_weight}")

# --- empirical channel frequencies for a fixed true label -----------------
n = 50_000
data = LabeledData(np.zeros((n, 1)), np.full(n, 3))
concealed = annotate_dataset(data, space, rng=0)
print(f"\ntrue label 3 annotated {n} times:")
print(f"  kept own label: {np.mean(concealed.s == 3):.4f}  (expected L/K = {space.subset_size / space.num_classes})")
print(f"  annotated none: {np.mean(concealed.s == NONE_LABEL):.4f}  (expected (K-L)/K = {(space.num_classes - space.subset_size) / space.num_classes})")
print(f"  any other label: {np.mean((concealed.s != 3) & (concealed.s != NONE_LABEL)):.4f}  (expected 0)")

# --- concealed-class instances are always none -----------------------------
cl_data = LabeledData(np.zeros((1000, 1)), np.full(1000, CONCEALED))
cl_annotated = annotate_dataset(cl_data, space, rng=1)
print(f"\nconcealed-class instances annotated none: {np.mean(cl_annotated.s == NONE_LABEL):.4f} (always)")

# --- analytic channel and its inversion ------------------------------------
posteriors = np.array(
    [
        [0.60, 0.20, 0.10, 0.05, 0.05],
        [0.05, 0.05, 0.10, 0.20, 0.60],
    ]
)
dist = FiniteDistribution(np.array([[0.0], [1.0]]), [0.5, 0.5], posteriors)
channel = apply_channel(dist, space)
recovered = invert_channel(channel, space)
print("\ntrue posteriors:")
print(posteriors)
print("annotation probabilities P(s | x)  [classes..., none]:")
print(np.round(channel.probs, 4))
print("recovered posteriors (closed-form inversion using only K and L):")
print(np.round(recovered, 12))
print(f"max round-trip error: {np.max(np.abs(recovered - posteriors)):.2e}")
