#!/usr/bin/env python
"""
censusboost
===========

Boosted decision trees for the UCI Adult census income task: profile the data,
score attributes with Extra Trees, grid-search the booster, train, evaluate and
predict.

Usage:
    python main.py profile --data data/                  # Box plots + correlations
    python main.py importance --data data/ --seeds 5     # Extra-Trees scores
    python main.py tune --data data/ --k 3               # Grid search
    python main.py train --data data/                    # Fit logit boosting (defaults)
    python main.py train --data data/ --mode algorithm1  # Fit exponential reweighting
    python main.py predict --model runs/model.json --data rows.test
"""

import argparse
import sys
from typing import Any, Dict, List, Optional

import src.config as config
from src.interfaces.importance_interface import cmd_importance
from src.interfaces.predict_interface import cmd_predict
from src.interfaces.profile_interface import cmd_profile
from src.interfaces.train_interface import cmd_train
from src.interfaces.tune_interface import cmd_tune


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Usage errors raise instead of exiting so main() can return 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def _csv(value: str) -> List[str]:
    return [item.strip() for item in value.split(",") if item.strip()]


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--data", "-d", nargs="+", required=True,
        help="Data files or directories (*.data and *.test files)",
    )
    parser.add_argument("--out", "-o", type=str, help="Output directory")
    parser.add_argument("--seed", type=int, help=f"Random seed (default {config.SEED}, "
                        f"or ${config.SEED_ENV_VAR})")
    parser.add_argument("--config", type=str, help="JSON config file")
    parser.add_argument("--n-jobs", dest="n_jobs", type=int, help="Parallel workers")


def _schema(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--schema", type=str, help="JSON schema-definition file")


def _split(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--ratio", type=float, help="Train fraction, in (0, 1)")
    parser.add_argument(
        "--drop", type=_csv, help="Comma-separated feature ids to drop (default F9,F14)"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="censusboost", description="Census income boosting pipeline")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("profile", help="Five-number summaries, box plots, correlations")
    _common(p)
    _schema(p)

    p = sub.add_parser("importance", help="Extra-Trees attribute importances")
    _common(p)
    _schema(p)
    p.add_argument("--trees", dest="n_trees", type=int, help="Number of trees")
    p.add_argument("--k-features", dest="k_features", type=int,
                   help="Candidate columns per split (default ceil(sqrt(p)))")
    p.add_argument("--eliminate", type=int, help="Suggest dropping the lowest N (default 2)")
    p.add_argument("--seeds", dest="repeats", type=int,
                   help="Repeat over N consecutive seeds and count the lowest-N hits")

    p = sub.add_parser("tune", help="Grid search with k-fold cross-validation")
    _common(p)
    _schema(p)
    _split(p)
    p.add_argument("--k", type=int, help="Number of folds (default 3)")
    p.add_argument("--grid", type=str, help="JSON grid file")

    p = sub.add_parser("train", help="Fit a boosted ensemble and evaluate it")
    _common(p)
    _schema(p)
    _split(p)
    p.add_argument("--mode", type=str, help="logit or algorithm1 (default logit)")
    p.add_argument("--estimators", dest="n_estimators", type=int, help="Boosting stages")
    p.add_argument("--depth", dest="max_depth", type=int, help="Tree depth")
    p.add_argument("--lr", dest="learning_rate", type=float, help="Learning rate")
    p.add_argument("--export-matrix", dest="export_matrix", action="store_true",
                   help="Also write the encoded feature matrix as CSV")

    p = sub.add_parser("predict", help="Score rows with a saved model")
    _common(p)
    p.add_argument("--model", "-m", required=True, help="model.json written by train")
    p.add_argument("--strict", action="store_true",
                   help="Exit 1 when any row cannot be scored")

    return parser


OVERRIDE_KEYS = (
    "seed", "n_jobs", "ratio", "drop", "k", "mode", "n_estimators", "max_depth",
    "learning_rate", "n_trees", "k_features", "eliminate", "repeats",
)


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    return {key: getattr(args, key) for key in OVERRIDE_KEYS if hasattr(args, key)}


def main(argv: Optional[List[str]] = None) -> int:
    """Main function with command line argument parsing"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as e:
        print(e, file=sys.stderr)
        return 2

    overrides = _overrides(args)
    if args.command == "profile":
        return cmd_profile(args.data, args.out, overrides, args.config, args.schema)
    if args.command == "importance":
        return cmd_importance(args.data, args.out, overrides, args.config, args.schema)
    if args.command == "tune":
        return cmd_tune(args.data, args.out, overrides, args.config, args.schema, args.grid)
    if args.command == "train":
        return cmd_train(
            args.data, args.out, overrides, args.config, args.schema, args.export_matrix
        )
    return cmd_predict(args.model, args.data, args.out, overrides, args.config, args.strict)


if __name__ == "__main__":
    sys.exit(main())
