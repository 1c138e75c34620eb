"""Command-line interface.

Exit codes: 0 success, 1 failed ``check``, 2 bad arguments, 3 numerical failure.
Relative output paths are resolved against ``$GVMIX_OUTPUT_DIR`` when set.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import checks, estimator, experiment, mixture, ratefns, stablelim
from .errors import DomainError, NumericError
from .experiment import DEFAULT_SEED
from .wfamily import parse_family

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3

OUTPUT_DIR_ENV = "GVMIX_OUTPUT_DIR"


def _out_path(path: str | None, default_name: str) -> Path:
    base = Path(os.environ.get(OUTPUT_DIR_ENV, "."))
    p = Path(path) if path else Path(default_name)
    if not p.is_absolute():
        p = base / p
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def _family(text: str):
    try:
        return parse_family(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _count(text: str) -> int:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value.is_integer() or value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text!r}")
    return int(value)


def _write_rows(rows: list[dict], out: str | None, default_name: str) -> None:
    if not rows:
        return
    if out == "-":
        fh = sys.stdout
    else:
        fh = _out_path(out, default_name).open("w", newline="")
    try:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    finally:
        if fh is not sys.stdout:
            fh.close()
            print(f"wrote {fh.name}", file=sys.stderr)


def cmd_sample(args) -> int:
    sample = mixture.sample_pairs(args.family, args.n, args.mu, args.seed)
    path = sample.to_csv(_out_path(args.out, "sample.csv"))
    print(f"wrote {path} ({len(sample)} rows) and {path.with_suffix('.json')}", file=sys.stderr)
    return EXIT_OK


def cmd_estimate(args) -> int:
    report = estimator.mle(mixture.read_csv(args.input))
    print(json.dumps(report.to_dict()))
    return EXIT_OK


def cmd_rates(args) -> int:
    if args.t:
        t_values = args.t
    else:
        t_values = np.geomspace(args.t_min, args.t_max, args.points).tolist()
    rows = ratefns.tabulate(args.family, t_values, args.method)
    _write_rows(rows, args.out, "rates.csv")
    return EXIT_OK


def cmd_limitlaw(args) -> int:
    if args.cdf:
        xs = np.linspace(args.x_min, args.x_max, args.points).tolist()
        values = stablelim.limit_cdf(args.beta, xs, args.m, args.seed)
        rows = [{"x": x, "cdf": float(v)} for x, v in zip(xs, values)]
        _write_rows(rows, args.out, "limit_cdf.csv")
        return EXIT_OK
    if args.kind == "subordinator":
        draws = stablelim.sample_subordinator(args.beta, args.n, args.seed).draws
    else:
        draws = stablelim.sample_scaled_error_limit(args.beta, args.n, args.seed).draws
    _write_rows([{args.kind: float(v)} for v in draws], args.out, f"{args.kind}.csv")
    return EXIT_OK


def cmd_experiment(args) -> int:
    config = experiment.load_config(args.config)
    result = experiment.run(config, workers=args.workers)
    out_dir = _out_path(args.out_dir, "experiment")
    out_dir.mkdir(parents=True, exist_ok=True)
    result.write_jsonl(out_dir / "results.jsonl")
    result.write_summary(out_dir / "summary.json")
    print(result.format_table())
    print(f"wrote {out_dir / 'results.jsonl'} and {out_dir / 'summary.json'}", file=sys.stderr)
    return EXIT_OK


def cmd_check(args) -> int:
    results = checks.run_checks()
    for r in results:
        print(r.line())
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gvmix",
        description="Gaussian variance mixtures with observed variances: MLE, rate functions, Monte Carlo checks.",
        allow_abbrev=False,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text, allow_abbrev=False)
        p.set_defaults(func=func)
        return p

    p = add("sample", cmd_sample, "draw (x, w) pairs to CSV with a JSON metadata sidecar")
    p.add_argument("--family", type=_family, required=True, help="e.g. rp:beta=0.7 or lp:beta=1,gamma=-1")
    p.add_argument("--n", type=_count, required=True)
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--seed", type=_count, default=DEFAULT_SEED)
    p.add_argument("--out", default=None, help="CSV path (default sample.csv)")

    p = add("estimate", cmd_estimate, "MLE of mu from a CSV with header x,w; prints JSON")
    p.add_argument("--input", required=True)

    p = add("rates", cmd_rates, "tabulate t, B, A, A/B, L(B(t)) on a log grid")
    p.add_argument("--family", type=_family, required=True)
    p.add_argument("--t", type=float, nargs="+", default=None, help="explicit t values (overrides the grid)")
    p.add_argument("--t-min", type=float, default=10.0)
    p.add_argument("--t-max", type=float, default=1e12)
    p.add_argument("--points", type=_count, default=12)
    p.add_argument("--method", choices=("auto", "closed", "numeric"), default="auto")
    p.add_argument("--out", default="-", help="CSV path, '-' for stdout")

    p = add("limitlaw", cmd_limitlaw, "draws of U_beta or Z/sqrt(U_beta), or a reference CDF table")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--kind", choices=("subordinator", "scaled_error_limit"), default="scaled_error_limit")
    p.add_argument("--n", type=_count, default=10_000)
    p.add_argument("--seed", type=_count, default=DEFAULT_SEED)
    p.add_argument("--cdf", action="store_true", help="emit a CDF table instead of draws")
    p.add_argument("--m", type=_count, default=100_000, help="cached draws behind the CDF")
    p.add_argument("--x-min", type=float, default=-5.0)
    p.add_argument("--x-max", type=float, default=5.0)
    p.add_argument("--points", type=_count, default=101)
    p.add_argument("--out", default="-", help="CSV path, '-' for stdout")

    p = add("experiment", cmd_experiment, "run a Monte Carlo experiment from a key = value config file")
    p.add_argument("--config", required=True)
    p.add_argument("--workers", type=_count, default=1)
    p.add_argument("--out-dir", default=None, help="directory for results.jsonl and summary.json")

    add("check", cmd_check, "run the fast invariant suite")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"gvmix {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericError as exc:
        print(f"gvmix {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"gvmix {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
