"""Seeded identity checks behind the ``verify`` CLI subcommand.

Each check exercises one of the package's core guarantees: channel
round-trip inversion, exact equality of the supervised and concealed-label
risks, the intermediate inversion identity, Monte-Carlo unbiasedness of the
empirical estimator, and the channel's annotation frequencies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .class_space import CONCEALED, NONE_LABEL, ClassSpace
from .data import LabeledData, annotate_dataset
from .losses import LossFamily, LossSpec, Surrogate
from .models import LinearModel
from .oracle import (
    apply_channel,
    exact_cl_risk,
    exact_supervised_risk,
    invert_channel,
    monte_carlo_unbiasedness,
    random_distribution,
)

ALL_LOSS_SPECS = (
    LossSpec(LossFamily.OVR, Surrogate.SQUARE),
    LossSpec(LossFamily.OVR, Surrogate.LOGISTIC),
    LossSpec(LossFamily.OVR, Surrogate.HINGE),
    LossSpec(LossFamily.CROSS_ENTROPY, None),
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def check_channel_round_trip(seed: int = 0, n_dists: int = 200) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    count = 0
    for k in (2, 3, 5, 10):
        for l in range(1, k + 1):
            space = ClassSpace(k, l, frozenset({"x"}))
            for _ in range(max(1, n_dists // (4 * k))):
                dist = random_distribution(space, n_atoms=4, dim=2, rng=rng)
                recovered = invert_channel(apply_channel(dist, space), space)
                worst = max(worst, float(np.max(np.abs(recovered - dist.posteriors))))
                count += 1
    return CheckResult(
        "channel round-trip inversion",
        worst <= 1e-12,
        f"max |recovered - true| = {worst:.2e} over {count} distributions",
    )


def check_risk_equality(seed: int = 0, n_models: int = 20, n_dists: int = 5) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for k, l in ((2, 1), (3, 2), (5, 5)):
        space = ClassSpace(k, l, frozenset({"x"}))
        for _ in range(n_dists):
            dist = random_distribution(space, n_atoms=5, dim=3, rng=rng)
            for _ in range(n_models):
                model = LinearModel(3, k + 1, rng=int(rng.integers(2**31)))
                for spec in ALL_LOSS_SPECS:
                    gap = abs(
                        exact_supervised_risk(dist, model, spec)
                        - exact_cl_risk(dist, space, model, spec)
                    )
                    worst = max(worst, gap)
    return CheckResult(
        "supervised risk equals concealed-label risk",
        worst <= 1e-10,
        f"max |difference| = {worst:.2e}",
    )


def check_inversion_identity(seed: int = 0, n_dists: int = 50) -> CheckResult:
    # P(y=i|x) = P(s=i|x) + (K-L)/K * P(y=i|x) for every unconcealed class.
    rng = np.random.default_rng(seed)
    worst = 0.0
    for k, l in ((3, 1), (4, 2), (5, 4)):
        space = ClassSpace(k, l, frozenset({"x"}))
        for _ in range(n_dists):
            dist = random_distribution(space, n_atoms=3, dim=2, rng=rng)
            chan = apply_channel(dist, space).probs
            lhs = dist.posteriors[:, :k]
            rhs = chan[:, :k] + (k - l) / k * dist.posteriors[:, :k]
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return CheckResult(
        "per-class inversion identity",
        worst <= 1e-12,
        f"max |lhs - rhs| = {worst:.2e}",
    )


def check_monte_carlo(seed: int = 0, replicates: int = 60, n: int = 500) -> CheckResult:
    space = ClassSpace(2, 1, frozenset({"x"}))
    dist = random_distribution(space, n_atoms=3, dim=2, rng=seed)
    model = LinearModel(2, 3, rng=seed + 1)
    spec = LossSpec(LossFamily.OVR, Surrogate.SQUARE)
    result = monte_carlo_unbiasedness(dist, space, model, spec, n, replicates, seed + 2)
    return CheckResult(
        "empirical risk unbiasedness (Monte Carlo)",
        result.within_3se,
        f"mean {result.mean:.5f} vs exact {result.exact:.5f} "
        f"(|gap| = {abs(result.mean - result.exact):.5f}, 3*SE = {3 * result.std_error:.5f})",
    )


def check_channel_frequencies(seed: int = 0, n_draws: int = 20000) -> CheckResult:
    ok = True
    details = []
    for k, l in ((10, 1), (10, 5), (5, 5)):
        space = ClassSpace(k, l, frozenset({"x"}))
        data = LabeledData(np.zeros((n_draws, 1)), np.full(n_draws, 1))
        concealed = annotate_dataset(data, space, seed)
        freq = float(np.mean(concealed.s == NONE_LABEL))
        expected = (k - l) / k
        se = np.sqrt(max(expected * (1 - expected), 1e-12) / n_draws)
        if expected == 0.0:
            good = freq == 0.0
        else:
            good = abs(freq - expected) <= 3 * se
        ok &= good
        details.append(f"K={k},L={l}: {freq:.4f} vs {expected:.4f}")
        # Concealed-class instances are always annotated none.
        cl_data = LabeledData(np.zeros((100, 1)), np.full(100, CONCEALED))
        cl_annotated = annotate_dataset(cl_data, space, seed + 1)
        ok &= bool(np.all(cl_annotated.s == NONE_LABEL))
    return CheckResult("channel annotation frequencies", bool(ok), "; ".join(details))


def run_all_checks(seed: int = 0) -> list[CheckResult]:
    return [
        check_channel_round_trip(seed),
        check_risk_equality(seed),
        check_inversion_identity(seed),
        check_monte_carlo(seed),
        check_channel_frequencies(seed),
    ]


def format_check_table(results: list[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = [
        f"{'check'.ljust(width)}  status  detail",
        f"{'-' * width}  ------  ------",
    ]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{r.name.ljust(width)}  {status:6}  {r.detail}")
    return "\n".join(lines)
