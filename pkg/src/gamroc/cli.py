"""Command-line entry point: ``gamroc simulate`` / ``gamroc resample``.

Options can also come from a flat key-value config file (``key = value``
per line, ``#`` comments); explicit command-line flags win on conflict.
"""

import argparse
import sys

from .harness import (
    METHOD_NAMES,
    ExperimentConfig,
    emit_report,
    load_csv,
    run_resampling,
    run_simulation,
)


def parse_config_file(path) -> dict:
    """Flat ``key = value`` text; later lines override earlier ones."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{line_no}: expected 'key = value', got {raw!r}")
            key, _, value = line.partition("=")
            out[key.strip()] = value.strip()
    return out


def _methods_arg(value):
    if value == "all":
        return METHOD_NAMES
    names = tuple(v.strip() for v in value.split(",") if v.strip())
    if not names:
        raise argparse.ArgumentTypeError("at least one method required")
    return names


def _add_common(sub):
    sub.add_argument("--config", help="flat key = value config file; flags override")
    sub.add_argument("--methods", type=_methods_arg, default=None,
                     help="comma-separated subset of: " + ",".join(METHOD_NAMES))
    sub.add_argument("--reps", type=int, default=None)
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--df-scale", type=float, default=None, dest="df_scale")
    sub.add_argument("--jobs", type=int, default=None)
    sub.add_argument("--out", default=None, help="output directory for report files")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gamroc",
        description="Benchmark additive-logistic classifiers against the linear baseline.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sim = subs.add_parser("simulate", help="synthetic train/test replications")
    sim.add_argument("--set", type=int, choices=(1, 2), default=None, dest="set_id")
    sim.add_argument("--dim", type=int, choices=(5, 10), default=None)
    sim.add_argument("--train-n", type=int, default=None, dest="train_n")
    sim.add_argument("--test-n", type=int, default=None, dest="test_n")
    _add_common(sim)

    res = subs.add_parser("resample", help="stratified resampling of a CSV dataset")
    res.add_argument("csv", help="input CSV with header row")
    res.add_argument("--label-column", required=True, dest="label_column")
    res.add_argument("--positive-label", required=True, dest="positive_label")
    res.add_argument("--train-frac", type=float, default=None, dest="train_frac")
    _add_common(res)
    return parser


_CONFIG_TYPES = {
    "reps": int, "seed": int, "jobs": int, "set_id": int, "dim": int,
    "train_n": int, "test_n": int, "df_scale": float, "train_frac": float,
    "methods": _methods_arg, "out": str,
}


def _resolve(args, key, default):
    """CLI flag > config file > default."""
    cli_val = getattr(args, key, None)
    if cli_val is not None:
        return cli_val
    if key in args._file_config:
        return _CONFIG_TYPES.get(key, str)(args._file_config[key])
    return default


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    args._file_config = parse_config_file(args.config) if args.config else {}

    common = dict(
        methods=_resolve(args, "methods", METHOD_NAMES),
        reps=_resolve(args, "reps", 100),
        seed=_resolve(args, "seed", 0),
        df_scale=_resolve(args, "df_scale", 1.4),
        jobs=_resolve(args, "jobs", 1),
    )
    out_dir = _resolve(args, "out", None)

    if args.command == "simulate":
        cfg = ExperimentConfig(
            mode="simulate",
            set_id=_resolve(args, "set_id", 1),
            dim=_resolve(args, "dim", 5),
            train_n=_resolve(args, "train_n", 100),
            test_n=_resolve(args, "test_n", 1000),
            output_dir=out_dir,
            **common,
        )
        report = run_simulation(cfg)
    else:
        cfg = ExperimentConfig(
            mode="resample",
            train_frac=_resolve(args, "train_frac", 0.9),
            output_dir=out_dir,
            **common,
        )
        dataset = load_csv(args.csv, args.label_column, args.positive_label)
        report = run_resampling(cfg, dataset)

    _print_summary(report)
    if out_dir:
        paths = emit_report(report, out_dir)
        print(f"\nreport files written to {out_dir}/ "
              f"({', '.join(sorted(p.rsplit('/', 1)[-1] for p in paths.values()))})")
    return 0


def _print_summary(report):
    cols = ("method", "auc_mean", "auc_sd", "auc_median", "time_mean_s", "n_failed")
    print("\t".join(cols))
    for m in report.config.methods:
        stats = report.summary[m]
        row = [m] + [
            f"{stats[c]:.4f}" if isinstance(stats[c], float) else str(stats[c])
            for c in cols[1:]
        ]
        print("\t".join(row))


if __name__ == "__main__":
    sys.exit(main())
