"""Command-line driver: ``sbmperturb <command> ...``.

Exit codes: 0 success, 1 usage or input error, 2 runtime failure, 3 when
``gof-test`` rejects the null model.
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys
import warnings

import numpy as np

from . import distributions as dist
from .errors import ParseError, SBMError, SchemaViolation
from .gof import STATISTIC_KINDS, estimate_num_communities, gof_test
from .io import FIGURES, load_adjacency, load_labels, parse_config, preset_config
from .montecarlo import SimulationConfig, reference_law, run_replications, summarize

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME, EXIT_REJECT = 0, 1, 2, 3
DENSITY_POINTS = 401


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sbmperturb", description="Spectral perturbation statistics for block models.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_run_opts(p):
        p.add_argument("--out", required=True, help="output directory (created if missing)")
        p.add_argument("--threads", type=int, default=1, help="worker threads, 0 = one per CPU")
        p.add_argument("--no-timestamp", action="store_true", help="omit the timestamp field from summaries")

    p = sub.add_parser("simulate", help="run a Monte Carlo experiment from a JSON config")
    p.add_argument("config")
    add_run_opts(p)

    p = sub.add_parser("reproduce-figure", help="run a figure preset")
    p.add_argument("figure", choices=sorted(FIGURES))
    p.add_argument("--n", type=int)
    p.add_argument("--K", type=int)
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--label-mode", choices=("oracle", "spectral"))
    add_run_opts(p)

    p = sub.add_parser("gof-test", help="test one network against a K0-block model")
    p.add_argument("adjacency")
    p.add_argument("--k0", type=int, required=True)
    p.add_argument("--statistic", choices=STATISTIC_KINDS, default="lss_normal")
    p.add_argument("--alpha", type=float, default=0.05)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--labels", help="labels file; implies oracle mode")
    group.add_argument("--label-mode", choices=("spectral",), default="spectral")
    p.add_argument("--seed", type=int)

    p = sub.add_parser("estimate-k", help="sequentially test K0 = 1..kmax")
    p.add_argument("adjacency")
    p.add_argument("--kmax", type=int, required=True)
    p.add_argument("--statistic", choices=STATISTIC_KINDS, default="lss_normal")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("tw1", help="Tracy-Widom (beta = 1) quantile or CDF")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--quantile", type=float, metavar="P")
    group.add_argument("--cdf", type=float, metavar="X")
    return parser


def density_grid(law) -> np.ndarray:
    if law.kind == "chi_square":
        return np.linspace(0.0, dist.quantile(law, 0.999), DENSITY_POINTS)
    if law.kind == "standard_normal":
        return np.linspace(-4.0, 4.0, DENSITY_POINTS)
    return np.linspace(dist.TW1_LO, dist.TW1_HI, DENSITY_POINTS)


def write_outputs(config: SimulationConfig, out_dir, threads: int, timestamp: bool) -> None:
    """Run a configuration and write replications.csv plus per-statistic summary and density files."""
    os.makedirs(out_dir, exist_ok=True)
    table = run_replications(config, threads=threads)
    table.to_csv(os.path.join(out_dir, "replications.csv"))
    if config.reps == 0:
        return
    report = summarize(table)
    stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds") if timestamp else None
    for name in config.statistics:
        summary = report[name].as_dict()
        if stamp:
            summary["timestamp"] = stamp
        with open(os.path.join(out_dir, f"summary_{name}.json"), "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=2)
            fh.write("\n")
        law = reference_law(name, config.K)
        if law is None:
            continue
        xs = density_grid(law)
        with open(os.path.join(out_dir, f"density_{name}.csv"), "w", encoding="utf-8") as fh:
            fh.write("x,density\n")
            for x, d in zip(xs, dist.pdf(law, xs)):
                fh.write(f"{float(x)!r},{float(d)!r}\n")


def _read_adjacency(path):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        A = load_adjacency(path)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return A


def _dispatch(args) -> int:
    if args.command == "simulate":
        config = parse_config(args.config)
        write_outputs(config, args.out, args.threads, not args.no_timestamp)
        return EXIT_OK
    if args.command == "reproduce-figure":
        config = preset_config(args.figure, n=args.n, K=args.K, reps=args.reps, seed=args.seed,
                               label_mode=args.label_mode)
        write_outputs(config, args.out, args.threads, not args.no_timestamp)
        return EXIT_OK
    if args.command == "gof-test":
        A = _read_adjacency(args.adjacency)
        if args.labels:
            labels = load_labels(args.labels)
            outcome = gof_test(A, args.k0, args.statistic, args.alpha, label_mode="oracle", labels=labels)
        else:
            outcome = gof_test(A, args.k0, args.statistic, args.alpha, label_mode="spectral", seed=args.seed)
        print(json.dumps(outcome.as_dict()))
        return EXIT_REJECT if outcome.reject else EXIT_OK
    if args.command == "estimate-k":
        A = _read_adjacency(args.adjacency)
        result = estimate_num_communities(A, args.kmax, args.statistic, args.alpha, seed=args.seed)
        print(json.dumps({"k_hat": result.k_hat, "trail": [o.as_dict() for o in result.trail]}))
        return EXIT_OK
    law = dist.tracy_widom_1()
    if args.quantile is not None:
        print(f"{dist.quantile(law, args.quantile):.6f}")
    else:
        print(f"{dist.cdf(law, args.cdf):.6f}")
    return EXIT_OK


def run_command(argv=None) -> int:
    """Parse ``argv`` and run one command, returning the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return _dispatch(args)
    except (ParseError, SchemaViolation, FileNotFoundError, IsADirectoryError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SBMError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main() -> None:
    sys.exit(run_command())
