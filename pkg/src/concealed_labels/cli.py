"""Command-line entry points.

Subcommands: ``synthesize`` (annotate a supervised dataset to concealed
form), ``train``, ``evaluate``, ``verify`` (identity-check suite),
``sweep-l`` (subset-size sweep), ``negrisk-report`` (plot data for the
negative-risk study).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .class_space import NONE_LABEL
from .config import load_config
from .data import annotate_dataset
from .harness import (
    load_dataset,
    negative_risk_report,
    run_experiment,
    sweep_subset_sizes,
)
from .models import evaluate, load_checkpoint
from .verification import format_check_table, run_all_checks


def _add_common(parser: argparse.ArgumentParser, config_required: bool = True) -> None:
    parser.add_argument("--config", required=config_required, help="experiment config file")
    parser.add_argument("--seed", type=int, default=None, help="override train.seed")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--trials", type=int, default=None, help="override train.trials")


def _load(args):
    config = load_config(args.config)
    if args.seed is not None:
        config = replace(config, train_seed=args.seed)
    if args.trials is not None:
        config = replace(config, train_trials=args.trials)
    return config


def cmd_synthesize(args) -> int:
    config = _load(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    source_train, _ = load_dataset(config)
    space = config.space()
    concealed = annotate_dataset(source_train, space, config.train_seed)
    np.save(out / "features.npy", concealed.x)
    table = out / "concealed.csv"
    with open(table, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["features_ref", "annotation", "sampled_set"])
        for i in range(len(concealed)):
            s = concealed.s[i]
            writer.writerow(
                [
                    i,
                    "none" if s == NONE_LABEL else str(int(s)),
                    ";".join(str(int(v)) for v in concealed.sampled_sets[i]),
                ]
            )
    print(
        f"wrote {table} ({concealed.n_labeled} labeled, {concealed.n_none} none) "
        f"and {out / 'features.npy'}"
    )
    return 0


def cmd_train(args) -> int:
    config = _load(args)
    result = run_experiment(config, args.out)
    summary = result.summary
    print(f"metrics: {result.metrics_path}")
    print(f"checkpoint: {result.checkpoint_path}")
    print(
        f"test accuracy: {summary['test_accuracy_mean']:.4f} "
        f"± {summary['test_accuracy_std']:.4f} over {summary['trials']} trial(s)"
    )
    return 0


def cmd_evaluate(args) -> int:
    config = _load(args)
    model, _, _, _ = load_checkpoint(args.checkpoint)
    _, source_test = load_dataset(config)
    accuracy, per_class = evaluate(model, source_test)
    print(json.dumps(
        {
            "test_accuracy": accuracy,
            "per_class_recall": [float(v) for v in per_class],
        },
        indent=2,
    ))
    return 0


def cmd_verify(args) -> int:
    results = run_all_checks(args.seed if args.seed is not None else 0)
    print(format_check_table(results))
    return 0 if all(r.passed for r in results) else 1


def cmd_sweep_l(args) -> int:
    config = _load(args)
    sizes = [int(v) for v in args.l_values.split(",")]
    summaries = sweep_subset_sizes(config, sizes, args.out)
    for size, summary in summaries.items():
        print(
            f"subset size {size}: accuracy "
            f"{summary['test_accuracy_mean']:.4f} ± {summary['test_accuracy_std']:.4f}"
        )
    return 0


def cmd_negrisk_report(args) -> int:
    out_path, first_negative = negative_risk_report(args.metrics, args.out, args.trial)
    print(f"wrote {out_path}")
    if first_negative is None:
        print("free risk never went negative")
    else:
        print(f"first negative free-risk epoch: {first_negative}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="concealed-labels",
        description="Learning from concealed labels: data synthesis, training, verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synthesize", help="annotate a supervised dataset to concealed form")
    _add_common(p)
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("train", help="run the configured experiment")
    _add_common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="evaluate a checkpoint on the config's test set")
    _add_common(p)
    p.add_argument("--checkpoint", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("verify", help="run the identity-check suite")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep-l", help="sweep the sampled-label-set size")
    _add_common(p)
    p.add_argument("--l-values", required=True, help="comma-separated subset sizes")
    p.set_defaults(func=cmd_sweep_l)

    p = sub.add_parser("negrisk-report", help="emit plot data from a metrics CSV")
    p.add_argument("--metrics", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--trial", type=int, default=0)
    p.set_defaults(func=cmd_negrisk_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
