import numpy as np
import pytest

from concealed_labels.demo_data import desk_digits_paths


def central_difference(fn, x0, step=1e-5):
    """Gradient oracle: central finite differences of a scalar function."""
    x0 = np.asarray(x0, dtype=float)
    grad = np.zeros_like(x0)
    flat = x0.ravel()
    out = grad.ravel()
    for i in range(flat.size):
        bumped = flat.copy()
        bumped[i] += step
        hi = fn(bumped.reshape(x0.shape))
        bumped[i] -= 2 * step
        lo = fn(bumped.reshape(x0.shape))
        out[i] = (hi - lo) / (2 * step)
    return grad


def relative_error(approx, exact):
    approx, exact = np.asarray(approx), np.asarray(exact)
    scale = max(1.0, float(np.max(np.abs(exact))))
    return float(np.max(np.abs(approx - exact))) / scale


@pytest.fixture(scope="session")
def digits_idx(tmp_path_factory):
    """Desk-scale handwritten-digit IDX files (real MNIST when available)."""
    return desk_digits_paths(tmp_path_factory.mktemp("idx"))
