"""Accuracy as a function of the sampled label set size.

Larger subsets reveal more true labels to the annotator, so accuracy rises
with L (sharply at first, flattening once most labels are revealed).  The
shared base seed nests the drawn subsets across L, so each column adds
supervision to the previous one.  Needs scikit-learn for the digits corpus.
"""

import tempfile

import numpy as np

from concealed_labels import Adam, ClassSpace, Correction, LinearModel, LossSpec, annotate_dataset, load_idx_pair, train
from concealed_labels.demo_data import desk_digits_paths

paths = desk_digits_paths(tempfile.mkdtemp())
space_proto = ClassSpace(9, 1, frozenset({5}))
train_data = load_idx_pair(paths["train_images"], paths["train_labels"], space_proto)
test_data = load_idx_pair(paths["test_images"], paths["test_labels"], space_proto)
spec = LossSpec()

print(f"{paths['source']}: digit 5 concealed, linear model, 3 seeds per subset size\n")
print("subset size   labeled frac   test accuracy (mean ± std)")
for subset_size in range(1, 8):
    space = ClassSpace(9, subset_size, frozenset({5}))
    accuracies = []
    labeled = None
    for seed in range(3):
        concealed = annotate_dataset(train_data, space, rng=500 + seed)
        labeled = concealed.n_labeled
        model = LinearModel(train_data.dim, 10, rng=600 + seed)
        model, log = train(
            model, concealed, space, spec, Correction.FREE,
            Adam(0.01, weight_decay=0.03), epochs=100, batch_size=256,
            seed=700 + seed, test_data=test_data,
        )
        accuracies.append(log[-1].test_accuracy)
    print(f"     L={subset_size}        {labeled / len(train_data):.3f}        "
          f"{100 * np.mean(accuracies):.2f} ± {100 * np.std(accuracies):.2f}")
