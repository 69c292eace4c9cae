"""Command line surface: train, predict, benchmark."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path as FsPath

import numpy as np

from .dataset import DataError, Dataset, load_csv, split_train_test
from .greedy import fit_greedy
from .tree import DecisionTree, accuracy
from .trainer import TrainConfig, train

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_DATA = 3

log = logging.getLogger("cgtree.cli")


def _add_train_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--time-limit", type=float, default=0.0,
                   help="seconds; 0 disables the limit")
    p.add_argument("--beta-mode", default="ub",
                   choices=["none", "lb", "ub", "eq", "all", "extra"])
    p.add_argument("--sp-mode", default="merged", choices=["merged", "original"])
    p.add_argument("--no-extra-init", action="store_true",
                   help="skip the extra greedy runs that seed the column pool")
    p.add_argument("--preprocess", default="auto", choices=["auto", "on", "off"],
                   help="duplicate-row merging (auto: only above 10000 rows)")
    p.add_argument("--heuristic-attempts", type=int, default=100)
    p.add_argument("--cut-period", type=int, default=10)


def _preprocess_flag(choice: str, num_rows: int) -> bool:
    if choice == "on":
        return True
    if choice == "off":
        return False
    return num_rows > 10_000


def _config(args, num_rows: int) -> TrainConfig:
    return TrainConfig(
        depth=args.depth,
        time_limit=args.time_limit,
        beta_mode=args.beta_mode,
        sp_mode=args.sp_mode,
        extra_init=not args.no_extra_init,
        preprocess=_preprocess_flag(args.preprocess, num_rows),
        seed=args.seed,
        heuristic_attempts=args.heuristic_attempts,
        cut_period=args.cut_period,
    )


def _target_col(raw):
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        return raw


def _setup_log(path):
    handler = logging.FileHandler(path) if path else logging.StreamHandler()
    handler.setFormatter(logging.Formatter("%(message)s"))
    root = logging.getLogger("cgtree")
    root.setLevel(logging.INFO)
    root.addHandler(handler)
    return handler


def _model_json(model) -> dict:
    data = model.tree.to_json()
    data["classes"] = model.class_names
    return data


def run_train(args) -> int:
    handler = _setup_log(args.log) if (args.log or args.verbose) else None
    try:
        data = load_csv(args.data, target_column=_target_col(args.target_col))
        if args.train_frac is not None:
            test_frac = args.test_frac if args.test_frac else (
                1.0 - args.train_frac
            )
            train_data, test_data = split_train_test(
                data, args.train_frac, test_frac, args.seed
            )
        else:
            train_data = data
            test_data = (
                load_csv(args.test_data, target_column=_target_col(args.target_col))
                if args.test_data
                else None
            )
        cfg = _config(args, train_data.num_rows)
        model = train(cfg, train_data)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        if handler is not None:
            logging.getLogger("cgtree").removeHandler(handler)

    out = FsPath(args.out)
    out.write_text(json.dumps(_model_json(model), indent=2, sort_keys=False) + "\n")
    stats = {
        "train_accuracy": model.train_accuracy,
        "lp_bound": model.lp_bound,
        "integer_value": model.integer_value,
        "optimal": model.optimal,
        "classes": model.class_names,
        "config": {k: v for k, v in vars(args).items() if k != "func"},
        "stats": model.stats.to_json(),
    }
    if test_data is not None and test_data.num_rows:
        stats["test_accuracy"] = accuracy(model.tree, test_data)
    if args.stats_out:
        FsPath(args.stats_out).write_text(json.dumps(stats, indent=2) + "\n")
    print(
        f"train_accuracy={model.train_accuracy:.4f} "
        f"integer_value={model.integer_value} lp_bound={model.lp_bound:.6f} "
        f"optimal={model.optimal}"
    )
    return EXIT_OK


def run_predict(args) -> int:
    try:
        payload = json.loads(FsPath(args.model).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read model: {exc}", file=sys.stderr)
        return EXIT_DATA
    tree = DecisionTree.from_json(payload)
    classes = payload.get("classes")

    def class_name(index: int) -> str:
        if classes and 0 <= index < len(classes):
            return classes[index]
        return str(index)

    try:
        if args.no_labels:
            rows = _load_unlabeled(args.data)
            targets = None
        else:
            data = load_csv(args.data, target_column=_target_col(args.target_col))
            rows = data.features
            targets = data
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    needed = max(tree.features[j] for j in range(len(tree.features))) + 1
    if rows.shape[1] < needed:
        print(
            f"error: model needs at least {needed} features, "
            f"data has {rows.shape[1]}",
            file=sys.stderr,
        )
        return EXIT_DATA

    correct = 0
    total_weight = 0
    for i in range(rows.shape[0]):
        leaf = tree.route(rows[i])
        pred = tree.targets[leaf - tree.topology.num_internal]
        print(class_name(pred))
        if targets is not None:
            row = targets.row(i)
            total_weight += row.weight
            if _matches(classes, pred, row, targets):
                correct += row.weight
    if targets is not None and total_weight:
        print(f"accuracy={correct / total_weight:.4f}", file=sys.stderr)
    return EXIT_OK


def _matches(model_classes, pred_index, row, data) -> bool:
    if model_classes:
        return (model_classes[pred_index] == data.class_names[row.target]
                if pred_index < len(model_classes) else False)
    return pred_index == row.target


def _load_unlabeled(path) -> np.ndarray:
    try:
        fh = open(path, newline="", encoding="utf-8")
    except FileNotFoundError:
        raise DataError(f"no such file: {path}") from None
    with fh:
        records = [row for row in csv.reader(fh) if row]
    if not records:
        raise DataError(f"{path}: file holds no rows")

    def parse(rec):
        return [float(c) for c in rec]

    try:
        parse(records[0])
        start = 0
    except ValueError:
        start = 1
    out = []
    for line_no, rec in enumerate(records[start:], start=start + 1):
        try:
            out.append(parse(rec))
        except ValueError as exc:
            raise DataError(f"{path}:{line_no}: {exc}") from None
    return np.array(out)


def run_benchmark(args) -> int:
    data_dir = FsPath(args.data_dir)
    files = sorted(data_dir.glob("*.csv"))
    if not files:
        print(f"error: no CSV files under {data_dir}", file=sys.stderr)
        return EXIT_DATA
    depths = [int(d) for d in args.depths.split(",")]
    seeds = [int(s) for s in args.seeds.split(",")]
    rows = []
    failures = []
    for path in files:
        for depth in depths:
            for seed in seeds:
                try:
                    rows.append(_benchmark_run(path, depth, seed, args))
                except Exception as exc:   # keep the sweep alive
                    failures.append((path.stem, depth, seed, str(exc)))
                    log.warning("benchmark failure %s k=%d seed=%d: %s",
                                path.stem, depth, seed, exc)
    out = FsPath(args.out)
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["dataset", "k", "seed", "cart_train", "cg_train", "gain",
             "cart_test", "cg_test", "test_gain", "lp_bound", "optimal"]
        )
        writer.writerows(rows)
    print(f"wrote {out} ({len(rows)} runs, {len(failures)} failures)")
    if args.report:
        _write_report(args.report, rows, failures, args)
    return EXIT_OK if not failures else EXIT_INTERNAL


def _benchmark_run(path, depth, seed, args):
    data = load_csv(str(path))
    train_data, test_data = split_train_test(data, 0.5, 0.25, seed)
    cart = fit_greedy(train_data, depth)
    cart_train = accuracy(cart, train_data)
    cart_test = accuracy(cart, test_data)
    cfg = TrainConfig(
        depth=depth,
        time_limit=args.time_limit,
        beta_mode=args.beta_mode,
        sp_mode=args.sp_mode,
        extra_init=not args.no_extra_init,
        preprocess=_preprocess_flag(args.preprocess, train_data.num_rows),
        seed=seed,
        heuristic_attempts=args.heuristic_attempts,
        cut_period=args.cut_period,
    )
    model = train(cfg, train_data)
    cg_test = accuracy(model.tree, test_data)
    return [
        path.stem, depth, seed,
        round(100 * cart_train, 2), round(100 * model.train_accuracy, 2),
        round(100 * (model.train_accuracy - cart_train), 2),
        round(100 * cart_test, 2), round(100 * cg_test, 2),
        round(100 * (cg_test - cart_test), 2),
        round(model.lp_bound, 4), model.optimal,
    ]


def _write_report(path, rows, failures, args):
    lines = ["# Benchmark report", ""]
    lines.append(f"configuration: beta-mode={args.beta_mode} "
                 f"sp-mode={args.sp_mode} time-limit={args.time_limit}s "
                 f"extra-init={not args.no_extra_init} "
                 f"preprocess={args.preprocess}")
    lines.append("")
    if rows:
        gains = [r[5] for r in rows]
        test_gains = [r[8] for r in rows]
        lines.append(f"runs: {len(rows)}")
        lines.append(f"mean train gain over greedy: {sum(gains)/len(gains):.2f} points")
        lines.append(
            f"mean test gain over greedy: {sum(test_gains)/len(test_gains):.2f} points"
        )
        opt = sum(1 for r in rows if r[10])
        lines.append(f"runs certified optimal for their candidate sets: "
                     f"{opt}/{len(rows)}")
    if failures:
        lines.append("")
        lines.append("## Failures")
        for item in failures:
            lines.append(f"- {item}")
    FsPath(path).write_text("\n".join(lines) + "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cgtree",
        description="Train fixed-depth decision trees by column generation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train a tree on a CSV file")
    p_train.add_argument("--data", required=True)
    p_train.add_argument("--test-data")
    p_train.add_argument("--target-col")
    p_train.add_argument("--train-frac", type=float,
                         help="train on a seeded fraction of --data")
    p_train.add_argument("--test-frac", type=float,
                         help="held-out fraction when --train-frac is used")
    _add_train_flags(p_train)
    p_train.add_argument("--out", required=True, help="model JSON path")
    p_train.add_argument("--stats-out", help="run statistics JSON path")
    p_train.add_argument("--log", help="progress log file (key=value lines)")
    p_train.add_argument("--verbose", action="store_true")
    p_train.set_defaults(func=run_train)

    p_pred = sub.add_parser("predict", help="predict classes for a CSV file")
    p_pred.add_argument("--model", required=True)
    p_pred.add_argument("--data", required=True)
    p_pred.add_argument("--target-col")
    p_pred.add_argument("--no-labels", action="store_true",
                        help="the CSV has no target column")
    p_pred.set_defaults(func=run_predict)

    p_bench = sub.add_parser("benchmark",
                             help="CART-vs-CG sweep over a directory of CSVs")
    p_bench.add_argument("--data-dir", required=True)
    p_bench.add_argument("--depths", default="2,3,4")
    p_bench.add_argument("--seeds", default="1,2,3,4,5")
    _add_train_flags(p_bench)
    p_bench.set_defaults(time_limit=600.0)
    p_bench.add_argument("--out", default="benchmark.csv")
    p_bench.add_argument("--report", help="markdown summary path")
    p_bench.set_defaults(func=run_benchmark)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:   # defensive: anything unexpected is internal
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
