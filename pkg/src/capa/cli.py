"""Command-line interface: ``capa sweep-power | sweep-users | sweep-aperture | verify``.

Exit status is 0 on success, 1 when the identity suite reports a failure and
2 on a usage or configuration error.
"""

import argparse
import sys
import time

from .exceptions import CapaError, ConfigError
from .experiment import emit_csv, load_config, run_sweep
from .identities import IDENTITIES, run_identity_suite
from .scenario import Scenario

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2

_SWEEPS = {"sweep-power": "power", "sweep-users": "users", "sweep-aperture": "aperture"}


def _float_list(text):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _tolerance(text):
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    if name not in IDENTITIES:
        raise argparse.ArgumentTypeError(f"unknown identity {name!r}")
    try:
        return name, float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tolerance for {name} is not a number: {value!r}") from None


def build_parser():
    parser = argparse.ArgumentParser(
        prog="capa",
        description="Linear receive beamforming for continuous aperture arrays.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, kind in _SWEEPS.items():
        p = sub.add_parser(name, help=f"Monte Carlo sweep over {kind}; writes CSV")
        p.add_argument("--config", help="JSON config file with flat dotted keys")
        p.add_argument("--seed", type=int)
        p.add_argument("--trials", type=int)
        p.add_argument("--out", help="output CSV path (default: stdout)")
        p.add_argument("--quad-order", type=int, dest="quad_order")
        p.add_argument("--arrays", help="comma-separated subset of capa,spda")
        p.add_argument("--schemes", help="comma-separated subset of MRC,ZF,MMSE")
        p.add_argument("--values", type=_float_list, help="comma-separated sweep values")
        p.add_argument("--threads", type=int, help="worker threads (overrides CAPA_THREADS)")

    v = sub.add_parser("verify", help="run the operator and matrix identity suite")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--random", type=int, default=100, help="number of random instances")
    v.add_argument("--draws", type=int, default=20, help="number of default-scenario user drops")
    v.add_argument("--quad-order", type=int, dest="quad_order", default=30)
    v.add_argument(
        "--tol",
        type=_tolerance,
        action="append",
        default=[],
        metavar="NAME=VALUE",
        help="override one identity's tolerance (repeatable)",
    )
    return parser


def _sweep(args, kind):
    config = load_config(args.config)
    file_kind = config.sweep_kind
    if args.config and file_kind != kind and _file_sets_kind(args.config):
        raise ConfigError(f"config file sets sweep.kind={file_kind!r} but the command is sweep-{kind}")
    config = config.override(
        sweep_kind=kind,
        seed=args.seed,
        trials=args.trials,
        quad_order=args.quad_order,
        arrays=args.arrays,
        schemes=args.schemes,
        sweep_values=args.values,
    )
    emit_csv(run_sweep(config, threads=args.threads), args.out)
    return EXIT_OK


def _file_sets_kind(path):
    import json

    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    return "sweep.kind" in raw or "kind" in raw.get("sweep", {})


def _verify(args):
    if args.quad_order < 1 or args.random < 0 or args.draws < 0:
        raise ConfigError("--quad-order must be >= 1 and instance counts >= 0")
    start = time.perf_counter()
    report = run_identity_suite(
        n_random=args.random,
        n_scenario=args.draws,
        seed=args.seed,
        tolerances=dict(args.tol),
        scenario=Scenario(quad_order=args.quad_order),
    )
    for line in report.lines():
        print(line)
    n_fail = sum(not r.passed for r in report.results.values())
    elapsed = time.perf_counter() - start
    print(f"{len(report.results)} identities, {n_fail} failed, {elapsed:.1f} s")
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return _verify(args)
        return _sweep(args, _SWEEPS[args.command])
    except ConfigError as exc:
        print(f"capa: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapaError as exc:
        print(f"capa: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VERIFY_FAILED if args.command == "verify" else EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
