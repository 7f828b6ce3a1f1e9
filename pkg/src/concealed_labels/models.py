"""Score models with exact analytic parameter gradients, and optimizers.

Gradients are hand-derived (no autodiff) and oracle-checked against central
finite differences in the test suite.  A training run is deterministic given
its seed: parameter initialization and batch shuffling use separate streams
spawned from the same seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .class_space import ClassSpace, index_to_label
from .data import ConcealedData, LabeledData
from .losses import LossFamily, LossSpec, Surrogate, loss_grad
from .risk import (
    Correction,
    EmptyPartitionError,
    empirical_risk,
    risk_gradient,
    supervised_risk,
)


class ScoreModel:
    """Base: maps (n, d) features to (n, K+1) scores with a flat parameter vector."""

    n_features: int
    n_outputs: int

    def get_params(self) -> np.ndarray:
        raise NotImplementedError

    def set_params(self, flat: np.ndarray) -> None:
        raise NotImplementedError

    def forward(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def backward(self, x: np.ndarray, score_grads: np.ndarray) -> np.ndarray:
        """Chain per-sample score gradients into a flat parameter gradient."""
        raise NotImplementedError

    @property
    def n_params(self) -> int:
        return self.get_params().size

    def _check_input(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            x = x[None, :]
        if x.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} features, got {x.shape[1]}")
        return x


def _uniform_init(rng, fan_in, shape):
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape)


class LinearModel(ScoreModel):
    def __init__(self, n_features: int, n_outputs: int, rng=0):
        rng = np.random.default_rng(rng)
        self.n_features = n_features
        self.n_outputs = n_outputs
        self.weights = _uniform_init(rng, n_features, (n_features, n_outputs))
        self.bias = _uniform_init(rng, n_features, n_outputs)

    def get_params(self):
        return np.concatenate([self.weights.ravel(), self.bias])

    def set_params(self, flat):
        flat = np.asarray(flat, dtype=float)
        w = self.weights.size
        self.weights = flat[:w].reshape(self.weights.shape).copy()
        self.bias = flat[w:].copy()

    def forward(self, x):
        x = self._check_input(x)
        return x @ self.weights + self.bias

    def backward(self, x, score_grads):
        x = self._check_input(x)
        g = np.asarray(score_grads, dtype=float)
        return np.concatenate([(x.T @ g).ravel(), g.sum(axis=0)])

    def architecture(self) -> dict:
        return {"kind": "linear", "n_features": self.n_features, "n_outputs": self.n_outputs}


class MLPModel(ScoreModel):
    """One hidden ReLU layer; subgradient at 0 is 0."""

    def __init__(self, n_features: int, hidden: int, n_outputs: int, rng=0):
        rng = np.random.default_rng(rng)
        self.n_features = n_features
        self.hidden = hidden
        self.n_outputs = n_outputs
        self.w1 = _uniform_init(rng, n_features, (n_features, hidden))
        self.b1 = _uniform_init(rng, n_features, hidden)
        self.w2 = _uniform_init(rng, hidden, (hidden, n_outputs))
        self.b2 = _uniform_init(rng, hidden, n_outputs)

    def get_params(self):
        return np.concatenate([self.w1.ravel(), self.b1, self.w2.ravel(), self.b2])

    def set_params(self, flat):
        flat = np.asarray(flat, dtype=float)
        i = 0
        for name in ("w1", "b1", "w2", "b2"):
            arr = getattr(self, name)
            setattr(self, name, flat[i : i + arr.size].reshape(arr.shape).copy())
            i += arr.size

    def forward(self, x):
        x = self._check_input(x)
        return np.maximum(x @ self.w1 + self.b1, 0.0) @ self.w2 + self.b2

    def backward(self, x, score_grads):
        x = self._check_input(x)
        g = np.asarray(score_grads, dtype=float)
        z1 = x @ self.w1 + self.b1
        a = np.maximum(z1, 0.0)
        dw2 = a.T @ g
        db2 = g.sum(axis=0)
        dz1 = (g @ self.w2.T) * (z1 > 0.0)
        dw1 = x.T @ dz1
        db1 = dz1.sum(axis=0)
        return np.concatenate([dw1.ravel(), db1, dw2.ravel(), db2])

    def architecture(self) -> dict:
        return {
            "kind": "mlp",
            "n_features": self.n_features,
            "hidden": self.hidden,
            "n_outputs": self.n_outputs,
        }


def build_model(arch: dict, rng=0) -> ScoreModel:
    if arch["kind"] == "linear":
        return LinearModel(arch["n_features"], arch["n_outputs"], rng)
    if arch["kind"] == "mlp":
        return MLPModel(arch["n_features"], arch["hidden"], arch["n_outputs"], rng)
    raise ValueError(f"unknown architecture kind {arch['kind']!r}")


class SGD:
    def __init__(self, lr: float, weight_decay: float = 0.0):
        if lr <= 0:
            raise ValueError("lr must be positive")
        self.lr = lr
        self.weight_decay = weight_decay

    def reset(self, n_params: int) -> None:
        pass

    def step(self, params, grad):
        if self.weight_decay:
            grad = grad + self.weight_decay * params
        return params - self.lr * grad

    def clone(self) -> "SGD":
        return SGD(self.lr, self.weight_decay)


class Adam:
    def __init__(
        self,
        lr: float,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
        weight_decay: float = 0.0,
    ):
        if lr <= 0:
            raise ValueError("lr must be positive")
        if not (0.0 <= beta1 < 1.0 and 0.0 <= beta2 < 1.0):
            raise ValueError("betas must lie in [0, 1)")
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.weight_decay = weight_decay
        self._m = self._v = None
        self._t = 0

    def reset(self, n_params: int) -> None:
        self._m = np.zeros(n_params)
        self._v = np.zeros(n_params)
        self._t = 0

    def step(self, params, grad):
        if self._m is None:
            self.reset(params.size)
        if self.weight_decay:
            grad = grad + self.weight_decay * params
        self._t += 1
        self._m = self.beta1 * self._m + (1 - self.beta1) * grad
        self._v = self.beta2 * self._v + (1 - self.beta2) * grad * grad
        m_hat = self._m / (1 - self.beta1 ** self._t)
        v_hat = self._v / (1 - self.beta2 ** self._t)
        return params - self.lr * m_hat / (np.sqrt(v_hat) + self.eps)

    def clone(self) -> "Adam":
        return Adam(self.lr, self.beta1, self.beta2, self.eps, self.weight_decay)


@dataclass
class EpochStats:
    epoch: int
    free_risk: float
    corrected_risk: float
    labeled_term: float
    none_term: float
    subtract_term: float
    batch_free_mean: float
    batch_corrected_mean: float
    test_accuracy: float | None = None
    test_per_class: np.ndarray | None = None
    train_accuracy: float | None = None


def stratified_batches(labeled_idx, none_idx, batch_size: int, rng) -> list[np.ndarray]:
    """Split both partitions across batches so each batch sees ≥ 1 of each.

    Batch count is capped by the smaller partition, so thin partitions widen
    the effective batch instead of starving it.
    """
    n = len(labeled_idx) + len(none_idx)
    n_batches = max(1, int(np.ceil(n / batch_size)))
    if len(labeled_idx) and len(none_idx):
        n_batches = min(n_batches, len(labeled_idx), len(none_idx))
    lab = rng.permutation(labeled_idx)
    non = rng.permutation(none_idx)
    return [
        np.concatenate([a, b])
        for a, b in zip(np.array_split(lab, n_batches), np.array_split(non, n_batches))
    ]


def train(
    model: ScoreModel,
    dataset: ConcealedData,
    space: ClassSpace,
    loss_spec: LossSpec,
    mode: Correction,
    optimizer,
    epochs: int,
    batch_size: int,
    seed: int,
    test_data: LabeledData | None = None,
    train_eval_data: LabeledData | None = None,
) -> tuple[ScoreModel, list[EpochStats]]:
    """Minimize the corrected risk with stratified mini-batches.

    The epoch log records both the full-dataset risk after each epoch and the
    mean of the per-batch risks seen during it.
    """
    if dataset.n_labeled == 0:
        raise EmptyPartitionError("labeled")
    if dataset.n_none == 0:
        raise EmptyPartitionError("none")
    rng = np.random.default_rng(seed)
    opt = optimizer.clone()
    opt.reset(model.n_params)
    labeled_idx = np.where(dataset.labeled_mask)[0]
    none_idx = np.where(~dataset.labeled_mask)[0]
    log: list[EpochStats] = []
    for epoch in range(epochs):
        batch_free, batch_corrected = [], []
        for idx in stratified_batches(labeled_idx, none_idx, batch_size, rng):
            batch = dataset.subset(idx)
            scores = model.forward(batch.x)
            report = empirical_risk(batch, scores, loss_spec, space, mode)
            score_grads = risk_gradient(batch, scores, loss_spec, space, mode)
            grad = model.backward(batch.x, score_grads)
            model.set_params(opt.step(model.get_params(), grad))
            batch_free.append(report.free_total)
            batch_corrected.append(report.total)
        full = empirical_risk(dataset, model.forward(dataset.x), loss_spec, space, mode)
        stats = EpochStats(
            epoch=epoch,
            free_risk=full.free_total,
            corrected_risk=full.total,
            labeled_term=full.labeled_term,
            none_term=full.none_term,
            subtract_term=full.subtract_term,
            batch_free_mean=float(np.mean(batch_free)),
            batch_corrected_mean=float(np.mean(batch_corrected)),
        )
        if test_data is not None:
            stats.test_accuracy, stats.test_per_class = evaluate(model, test_data)
        if train_eval_data is not None:
            stats.train_accuracy = evaluate(model, train_eval_data)[0]
        log.append(stats)
    return model, log


def train_supervised(
    model: ScoreModel,
    data: LabeledData,
    loss_spec: LossSpec,
    optimizer,
    epochs: int,
    batch_size: int,
    seed: int,
    test_data: LabeledData | None = None,
) -> tuple[ScoreModel, list[EpochStats]]:
    """Reference trainer: plain mean loss against true labels."""
    if len(data) == 0:
        raise ValueError("empty dataset")
    rng = np.random.default_rng(seed)
    opt = optimizer.clone()
    opt.reset(model.n_params)
    log: list[EpochStats] = []
    for epoch in range(epochs):
        order = rng.permutation(len(data))
        for idx in np.array_split(order, max(1, int(np.ceil(len(data) / batch_size)))):
            scores = model.forward(data.x[idx])
            score_grads = loss_grad(loss_spec, scores, data.y[idx]) / len(idx)
            grad = model.backward(data.x[idx], score_grads)
            model.set_params(opt.step(model.get_params(), grad))
        risk = supervised_risk(data, model.forward(data.x), loss_spec)
        stats = EpochStats(
            epoch=epoch,
            free_risk=risk,
            corrected_risk=risk,
            labeled_term=risk,
            none_term=0.0,
            subtract_term=0.0,
            batch_free_mean=risk,
            batch_corrected_mean=risk,
        )
        if test_data is not None:
            stats.test_accuracy = evaluate(model, test_data)[0]
        log.append(stats)
    return model, log


def predict(model: ScoreModel, x) -> np.ndarray:
    """Argmax prediction; ties go to the lowest class, concealed last."""
    scores = model.forward(x)
    return predict_from_scores(scores, model.n_outputs - 1)


def predict_from_scores(scores, num_classes: int) -> np.ndarray:
    scores = np.atleast_2d(np.asarray(scores, dtype=float))
    return index_to_label(np.argmax(scores, axis=1), num_classes)


def evaluate(model: ScoreModel, test: LabeledData) -> tuple[float, np.ndarray]:
    """Overall accuracy over K+1 classes plus per-class recall.

    Recall entries are ordered [class 1, ..., class K, concealed]; classes
    absent from the test set get NaN.
    """
    if len(test) == 0:
        raise ValueError("empty test set")
    num_classes = model.n_outputs - 1
    pred = predict(model, test.x)
    correct = pred == test.y
    per_class = np.full(num_classes + 1, np.nan)
    for col in range(num_classes + 1):
        label = int(index_to_label(col, num_classes))
        mask = test.y == label
        if mask.any():
            per_class[col] = float(np.mean(correct[mask]))
    return float(np.mean(correct)), per_class


def save_checkpoint(path, model: ScoreModel, space: ClassSpace, loss_spec: LossSpec, extra: dict | None = None) -> None:
    """Self-describing checkpoint: architecture + space + loss + parameters."""
    meta = {
        "architecture": model.architecture(),
        "space": {
            "num_classes": space.num_classes,
            "subset_size": space.subset_size,
            "concealed_source_labels": sorted(str(v) for v in space.concealed_source_labels),
        },
        "loss": {
            "family": loss_spec.family.value,
            "surrogate": loss_spec.surrogate.value if loss_spec.surrogate else None,
            "clamp": loss_spec.clamp,
        },
        "extra": extra or {},
    }
    np.savez(path, meta=json.dumps(meta, sort_keys=True), params=model.get_params())


def load_checkpoint(path) -> tuple[ScoreModel, ClassSpace, LossSpec, dict]:
    with np.load(path, allow_pickle=False) as payload:
        meta = json.loads(str(payload["meta"]))
        params = payload["params"]
    model = build_model(meta["architecture"], rng=0)
    model.set_params(params)
    space = ClassSpace(
        meta["space"]["num_classes"],
        meta["space"]["subset_size"],
        frozenset(meta["space"]["concealed_source_labels"]),
    )
    loss_spec = LossSpec(
        LossFamily(meta["loss"]["family"]),
        Surrogate(meta["loss"]["surrogate"]) if meta["loss"]["surrogate"] else None,
        meta["loss"]["clamp"],
    )
    return model, space, loss_spec, meta["extra"]
