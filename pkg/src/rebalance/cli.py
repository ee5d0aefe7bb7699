"""Command-line interface.

    rebalance gen       --out data.csv [--pca 2] [--train-out t.csv --test-out v.csv]
    rebalance resample  --in train.csv --method smote --ratio 0.5 --out res.csv
    rebalance train     --in train.csv [--penalty l2 --strength 1] [--balanced] --out-model m.txt
    rebalance bench     --methods all --seed 0 [--sweep-seeds 5] --out bench.csv
    rebalance plot      --data train.csv [--model m.txt] --out fig.svg

Exit status: 0 success, 1 usage error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .core import load_csv, save_csv, write_text_atomic
from .datagen import GenParams, generate, pca_project
from .ensemble import balance_cascade, easy_ensemble
from .eval import (ALL_METHODS, SplitSpec, format_table, grid_search_logistic, rows_to_csv,
                   run_benchmark, stratified_split)
from .learn import balanced_weights, fit_adaboost, fit_logistic
from .plot import render_plot
from .resample import METHODS as SAMPLERS
from .resample import resample
from .serialize import model_from_text, model_to_text

log = logging.getLogger("rebalance")

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _weights(text: str) -> tuple[float, float]:
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("weights must be two comma-separated fractions")
    return float(parts[0]), float(parts[1])


def _methods(text: str) -> list[str]:
    if text == "all":
        return list(ALL_METHODS)
    names = [m.strip() for m in text.split(",") if m.strip()]
    bad = [m for m in names if m not in ALL_METHODS]
    if bad or not names:
        raise argparse.ArgumentTypeError(
            f"unknown method(s) {', '.join(bad) or '(none)'}; "
            f"valid: all, {', '.join(ALL_METHODS)}")
    return names


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rebalance", description="Resampling for imbalanced binary data.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate a synthetic dataset as CSV")
    d = GenParams()
    g.add_argument("--n-samples", type=int, default=d.n_samples)
    g.add_argument("--weights", type=_weights, default=d.weights,
                   help="class fractions, e.g. 0.1,0.9")
    g.add_argument("--class-sep", type=float, default=d.class_sep)
    g.add_argument("--n-features", type=int, default=d.n_features)
    g.add_argument("--n-informative", type=int, default=d.n_informative)
    g.add_argument("--n-redundant", type=int, default=d.n_redundant)
    g.add_argument("--n-clusters-per-class", type=int, default=d.n_clusters_per_class)
    g.add_argument("--label-noise", type=float, default=d.label_noise)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--pca", type=int, default=0, metavar="K",
                   help="project onto K principal components (0 = keep raw features)")
    g.add_argument("--out", required=True)
    g.add_argument("--train-out", help="also write the stratified training split here")
    g.add_argument("--test-out", help="also write the test split here")
    g.add_argument("--train-fraction", type=float, default=0.7)

    r = sub.add_parser("resample", help="resample a CSV dataset")
    r.add_argument("--in", dest="infile", required=True)
    r.add_argument("--method", required=True, choices=list(SAMPLERS))
    r.add_argument("--k", type=int, default=None, help="neighbour count (method default if omitted)")
    r.add_argument("--ratio", type=float, default=0.5, help="target |S|/|L|")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--out", required=True)
    r.add_argument("--report", help="write the report here instead of stdout")

    t = sub.add_parser("train", help="fit a model and save it as a text record")
    t.add_argument("--in", dest="infile", required=True)
    t.add_argument("--learner", default="logistic",
                   choices=["logistic", "adaboost", "easy-ensemble", "balance-cascade"])
    t.add_argument("--penalty", choices=["l1", "l2"],
                   help="logistic penalty; with --strength omitted, both are grid-searched")
    t.add_argument("--strength", type=float, help="inverse regularization C")
    t.add_argument("--balanced", action="store_true", help="class weights n/(2 n_j)")
    t.add_argument("--folds", type=int, default=5)
    t.add_argument("--rounds", type=int, default=10, help="AdaBoost rounds per member")
    t.add_argument("--members", type=int, default=None, help="ensemble size")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--out-model", required=True)

    b = sub.add_parser("bench", help="run the benchmark table")
    b.add_argument("--methods", type=_methods, default=list(ALL_METHODS),
                   help="'all' or a comma list of: " + ", ".join(ALL_METHODS))
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--sweep-seeds", type=int, default=1, metavar="N",
                   help="run seeds seed..seed+N-1 and append all rows")
    b.add_argument("--out", help="benchmark CSV path")

    pl = sub.add_parser("plot", help="render an SVG scatter / decision-region figure")
    pl.add_argument("--data", required=True)
    pl.add_argument("--model")
    pl.add_argument("--grid-res", type=int, default=100)
    pl.add_argument("--out", required=True)
    return p


def _cmd_gen(a) -> int:
    params = GenParams(a.n_samples, a.weights, a.class_sep, a.n_features, a.n_informative,
                       a.n_redundant, a.n_clusters_per_class, a.label_noise, a.seed)
    data = generate(params)
    if a.pca:
        data = pca_project(data, a.pca)
    save_csv(data, a.out)
    if a.train_out or a.test_out:
        train, test = stratified_split(data, SplitSpec(a.train_fraction, 5, a.seed))
        if a.train_out:
            save_csv(train, a.train_out)
        if a.test_out:
            save_csv(test, a.test_out)
    n0, n1 = data.counts()
    print(f"wrote {len(data)} points ({n0} majority, {n1} minority) to {a.out}")
    return EXIT_OK


def _cmd_resample(a) -> int:
    data = load_csv(a.infile)
    out, report = resample(data, a.method, k=a.k, r_target=a.ratio, seed=a.seed)
    save_csv(out, a.out)
    if a.report:
        write_text_atomic(a.report, report.to_text())
    else:
        sys.stdout.write(report.to_text())
    return EXIT_OK


def _cmd_train(a) -> int:
    data = load_csv(a.infile)
    if a.learner == "logistic":
        if a.strength is None:
            grid = [(s, p) for s in (0.01, 0.1, 1.0, 10.0, 100.0)
                    for p in ([a.penalty] if a.penalty else ["l2", "l1"])]
            penalty, strength = grid_search_logistic(
                data, SplitSpec(0.7, a.folds, a.seed), balanced=a.balanced, grid=grid)
        else:
            penalty, strength = (a.penalty or "l2"), a.strength
        cw = balanced_weights(data) if a.balanced else None
        model = fit_logistic(data, penalty, strength, cw)
    elif a.learner == "adaboost":
        model = fit_adaboost(data, rounds=a.rounds, seed=a.seed)
    elif a.learner == "easy-ensemble":
        model = easy_ensemble(data, n_members=a.members or 10, rounds=a.rounds, seed=a.seed)
    else:
        model = balance_cascade(data, n_members=a.members or 4, rounds=a.rounds, seed=a.seed)
    write_text_atomic(a.out_model, model_to_text(model))
    print(f"wrote {a.learner} model to {a.out_model}")
    return EXIT_OK


def _cmd_bench(a) -> int:
    if a.sweep_seeds < 1:
        raise UsageError("bench: error: --sweep-seeds must be at least 1")
    rows = []
    for s in range(a.seed, a.seed + a.sweep_seeds):
        rows += run_benchmark(method_list=a.methods, seed=s)
    sys.stdout.write(format_table(rows))
    if a.out:
        write_text_atomic(a.out, rows_to_csv(rows))
    return EXIT_RUNTIME if any(r.error for r in rows) else EXIT_OK


def _cmd_plot(a) -> int:
    data = load_csv(a.data)
    model = model_from_text(Path(a.model).read_text(encoding="utf-8")) if a.model else None
    write_text_atomic(a.out, render_plot(data, model, a.grid_res))
    return EXIT_OK


COMMANDS = {"gen": _cmd_gen, "resample": _cmd_resample, "train": _cmd_train,
            "bench": _cmd_bench, "plot": _cmd_plot}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - reported as a runtime failure
        print(f"rebalance {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
