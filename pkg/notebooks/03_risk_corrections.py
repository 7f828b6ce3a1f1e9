"""Correction modes: free, max-operator, absolute value.

The free estimator's bracket (none term minus subtracted term) can go
negative on a finite batch.  The corrections wrap it with max{0, .} or |.|,
keeping the total non-negative; they differ in how they push back when the
bracket is negative.
"""

import numpy as np

from concealed_labels import (
    NONE_LABEL,
    ClassSpace,
    ConcealedData,
    Correction,
    LinearModel,
    LossSpec,
    empirical_risk,
    per_class_risk,
    risk_gradient,
)

space = ClassSpace(num_classes=2, subset_size=1, concealed_source_labels={"secret"})
spec = LossSpec()

# A tiny hand-built batch whose bracket is negative: the model scores the
# labeled sample perfectly for its class and confidently against the
# concealed class, which inflates the subtracted term.
batch = ConcealedData(np.zeros((2, 1)), np.array([1, NONE_LABEL]), 2)
scores = np.array([[1.0, -1.0, -1.0], [-1.0, -1.0, 1.0]])

for mode in Correction:
    report = empirical_risk(batch, scores, spec, space, mode)
    print(f"{mode.value:>4}: labeled {report.labeled_term:+.2f}  none {report.none_term:+.2f}  "
          f"subtract {report.subtract_term:+.2f}  bracket {report.raw_bracket:+.2f}  "
          f"total {report.total:+.2f}")

print("\nper-label decomposition (sums to the free total):")
entries = per_class_risk(batch, scores, spec, space)
print(f"  {np.round(entries, 4)}  sum = {entries.sum():+.4f}")

print("\ngradient norms per correction (bracket < 0 here):")
for mode in Correction:
    grad = risk_gradient(batch, scores, spec, space, mode)
    print(f"  {mode.value:>4}: |grad| = {np.linalg.norm(grad):.4f}")
print("max clips the bracket's gradient to zero; abs flips its sign.")
