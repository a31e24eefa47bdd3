"""Command-line entry point: ``run``, ``chaos-diag``, ``ttest`` and ``synth``.

Exit codes: 0 success, 2 config error, 3 data error, 4 runtime failure.
"""

import argparse
import json
import logging
import os
import sys
from dataclasses import replace

from .chaos import DEFAULT_BURN_IN
from .data import generate_synthetic_dataset, save_dataset
from .errors import ConfigError, DataError
from .experiments import (
    ExperimentReport,
    chaos_histograms,
    export_diagnostics,
    load_config,
    load_experiment_dataset,
    lyapunov_summary,
    run_experiment,
    two_sample_t_test,
)

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_RUNTIME = 0, 2, 3, 4

log = logging.getLogger("cqbde")


def _cmd_run(args):
    config = load_config(args.config)
    overrides = {}
    if args.runs is not None:
        overrides["runs"] = args.runs
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.dataset is not None:
        overrides["dataset"] = os.path.abspath(args.dataset)
        overrides["dataset_format"] = args.format or config.dataset_format
    if overrides:
        config = replace(config, **overrides)
    dataset = load_experiment_dataset(config)
    log.info("dataset: %d rows x %d features (%s)", dataset.n_samples, dataset.n_features, dataset.storage)
    report = run_experiment(config, dataset, jobs=args.jobs)
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "report.json"), "w") as fh:
        fh.write(report.to_json())
    with open(os.path.join(args.out, "report.txt"), "w") as fh:
        fh.write(report.to_text())
    export_diagnostics(args.out, report=report)
    sys.stdout.write(report.to_text())
    return EXIT_OK


def _cmd_chaos_diag(args):
    hist = chaos_histograms(args.seed_state, args.samples, args.bins, args.burn_in, args.uniform_seed)
    paths = export_diagnostics(args.out, histogram=hist)
    if args.horizon:
        lyap = lyapunov_summary(horizon=args.horizon)
        p = os.path.join(args.out, "lyapunov.json")
        with open(p, "w") as fh:
            json.dump(lyap, fh, indent=2, sort_keys=True)
        paths.append(p)
    for p in paths:
        print(p)
    return EXIT_OK


def _read_report(path):
    try:
        with open(path) as fh:
            return ExperimentReport.from_json(fh.read())
    except (OSError, ValueError, KeyError) as exc:
        raise DataError(f"cannot read report {path}: {exc}") from None


def _cmd_ttest(args):
    a = _read_report(args.report_a).cell(args.cell_a)
    b = _read_report(args.report_b).cell(args.cell_b)
    res = two_sample_t_test(a.aucs(), b.aucs())
    rows = [("model", "mean_auc", "mean_cardinality"),
            (a.label, f"{a.mean_auc:.3f}", f"{a.mean_cardinality:.2f}"),
            (b.label, f"{b.mean_auc:.3f}", f"{b.mean_cardinality:.2f}")]
    w = [max(len(r[i]) for r in rows) for i in range(3)]
    for r in rows:
        print("  ".join(v.ljust(w[i]) for i, v in enumerate(r)))
    print(f"t-statistic {res.t_statistic:.3f}  p-value {res.p_value:.4g}  df {res.df}")
    return EXIT_OK


def _cmd_synth(args):
    try:
        data = generate_synthetic_dataset(args.samples, args.features, args.informative, args.noise, args.seed,
                                          args.profile)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    save_dataset(data, args.out, args.format)
    print(args.out)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="cqbde", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run an experiment from a TOML config")
    r.add_argument("config")
    r.add_argument("--out", default="results")
    r.add_argument("--dataset", help="override the config's dataset path")
    r.add_argument("--format", choices=["csv", "libsvm"])
    r.add_argument("--runs", type=int)
    r.add_argument("--seed", type=int)
    r.add_argument("--jobs", type=int, help="concurrent runs (default: config value)")
    r.set_defaults(func=_cmd_run)

    c = sub.add_parser("chaos-diag", help="histogram and Lyapunov diagnostics of the logistic map")
    c.add_argument("--out", default="chaos-diag")
    c.add_argument("--seed-state", type=float, default=0.3)
    c.add_argument("--samples", type=int, default=100_000)
    c.add_argument("--bins", type=int, default=50)
    c.add_argument("--burn-in", type=int, default=DEFAULT_BURN_IN)
    c.add_argument("--uniform-seed", type=int, default=0)
    c.add_argument("--horizon", type=int, default=0, help="also estimate Lyapunov exponents over this horizon")
    c.set_defaults(func=_cmd_chaos_diag)

    t = sub.add_parser("ttest", help="two-sample t-test between two report cells")
    t.add_argument("report_a")
    t.add_argument("report_b")
    t.add_argument("--cell-a", help="VARIANT+CLASSIFIER in report A (default: first)")
    t.add_argument("--cell-b", help="VARIANT+CLASSIFIER in report B (default: first)")
    t.set_defaults(func=_cmd_ttest)

    s = sub.add_parser("synth", help="write a synthetic dataset")
    s.add_argument("out")
    s.add_argument("--samples", type=int, default=200)
    s.add_argument("--features", type=int, default=50)
    s.add_argument("--informative", type=int, default=5)
    s.add_argument("--noise", type=float, default=0.25)
    s.add_argument("--profile", choices=["decay", "equal"], default="decay")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--format", choices=["csv", "libsvm"], default="csv")
    s.set_defaults(func=_cmd_synth)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except (DataError, OSError) as exc:
        log.error("data error: %s", exc)
        return EXIT_DATA
    except KeyError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001
        log.exception("runtime failure: %s", exc)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
