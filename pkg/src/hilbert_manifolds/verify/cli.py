"""``hilbert-verify``: run verification suites from the shell.

Exit status: 0 pass, 1 fail, 2 usage error (no report), 3 internal failure
(report still written).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from .suites import REGISTRY, ConfigError, SuiteConfig, run_suite

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _tol(text):
    name, sep, value = text.partition("=")
    if not sep or not name:
        raise argparse.ArgumentTypeError(f"expected NAME=FLOAT, got {text!r}")
    try:
        return name, float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {value!r}") from None


def _uint64(text):
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def build_parser():
    parser = _Parser(prog="hilbert-verify", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("list", help="show the registered suites and their anchors")
    v = sub.add_parser("verify", help="run one suite, or 'all'")
    v.add_argument("suite")
    v.add_argument("--n", type=int)
    v.add_argument("--p", type=int)
    v.add_argument("--k", type=int)
    v.add_argument("--window", type=int, help="window radius of l2 truncations")
    v.add_argument("--trials", type=int)
    v.add_argument("--seed", type=_uint64, default=0)
    v.add_argument("--tol", type=_tol, action="append", default=[], metavar="NAME=FLOAT")
    v.add_argument("--out", help="write the JSON report here")
    v.add_argument("--csv", help="write one row per check here")
    v.add_argument("--no-runtime", action="store_true", help="omit runtime_ms (byte-stable reports)")
    v.add_argument("--quiet", action="store_true")
    return parser


def _configs(args, seed):
    names = list(REGISTRY) if args.suite == "all" else [args.suite]
    dims = {k: v for k, v in (("n", args.n), ("p", args.p), ("k", args.k), ("window_radius", args.window)) if v is not None}
    tols = dict(args.tol)
    out = []
    for name in names:
        suite_tols = tols
        if args.suite == "all":  # a tolerance applies to the suites that know it
            suite_tols = {k: v for k, v in tols.items() if k in REGISTRY[name].tolerances}
        out.append(SuiteConfig(name, dict(dims), args.trials, seed, suite_tols, args.out))
    return out


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list":
        for s in REGISTRY.values():
            print(f"{s.name:22s} {s.anchor}")
        return EXIT_PASS
    if args.suite != "all" and args.suite not in REGISTRY:
        print(f"hilbert-verify: unknown suite {args.suite!r}; try 'hilbert-verify list'", file=sys.stderr)
        return EXIT_USAGE
    seed = args.seed
    if os.environ.get("VERIFY_SEED"):
        try:
            seed = _uint64(os.environ["VERIFY_SEED"])
        except (ValueError, argparse.ArgumentTypeError):
            print("hilbert-verify: VERIFY_SEED is not an unsigned 64-bit integer", file=sys.stderr)
            return EXIT_USAGE
    configs = _configs(args, seed)
    reports = []
    for cfg in configs:
        try:
            rep = run_suite(cfg)
        except ConfigError as exc:
            print(f"hilbert-verify: invalid config: {exc}", file=sys.stderr)
            return EXIT_USAGE
        reports.append(rep)
        if not args.quiet:
            status = "ERROR" if rep.error else ("PASS" if rep.passed else "FAIL")
            print(f"{status:5s} {rep.suite_name:22s} {len(rep.checks):3d} checks  {rep.runtime_ms:10.1f} ms")
            for c in rep.checks:
                if not c["passed"]:
                    print(f"      {c['check_id']}: value {c['value']!r} bound {c['bound']!r}")
            if rep.error:
                print(f"      {rep.error}")
    runtime = not args.no_runtime
    if args.out:
        if len(reports) == 1 and args.suite != "all":
            doc = reports[0].to_dict(runtime)
        else:
            doc = {"passed": all(r.passed for r in reports), "reports": [r.to_dict(runtime) for r in reports]}
        with open(args.out, "w") as fh:
            json.dump(doc, fh, sort_keys=True, indent=2)
            fh.write("\n")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["suite", "check_id", "value", "bound", "margin"])
            for r in reports:
                w.writerows((s, c, repr(v), repr(b), repr(m)) for s, c, v, b, m in r.csv_rows())
    if any(r.error for r in reports):
        return EXIT_INTERNAL
    return EXIT_PASS if all(r.passed for r in reports) else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
