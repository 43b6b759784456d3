"""Command line entry point.

Exit codes: 0 all checks passed, 1 a check failed, 2 invalid input,
3 capacity exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import yaml

from .fincat import CapacityError
from .galois import InternalityError
from .scenario import (
    CHECK_ORDER,
    ScenarioError,
    bundled_names,
    bundled_path,
    dump_scenario,
    export_report,
    generate_example,
    load_scenario,
    report_from_json,
    run_scenario,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_CAPACITY = 0, 1, 2, 3


def _resolve(path):
    p = Path(path)
    if not p.exists() and not p.suffix and path in bundled_names():
        return bundled_path(path)
    return p


def _load_expect(path):
    try:
        data = yaml.safe_load(Path(path).read_text())
    except (OSError, yaml.YAMLError) as exc:
        raise ScenarioError(f"--expect-file: {exc}") from None
    if not isinstance(data, dict):
        raise ScenarioError("--expect-file: expected a mapping")
    return data


def _emit(text, output):
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_validate(args):
    sc = load_scenario(_resolve(args.scenario))
    print(f"{sc.name}: ok ({len(sc.checks)} checks declared)")
    return EXIT_OK


def cmd_run(args):
    sc = load_scenario(_resolve(args.scenario))
    checks = None
    if args.checks:
        checks = [c.strip() for c in args.checks.split(",") if c.strip()]
        bad = [c for c in checks if c not in CHECK_ORDER]
        if bad:
            raise ScenarioError(f"--checks: unknown check(s) {', '.join(bad)}")
    expected = _load_expect(args.expect_file) if args.expect_file else None
    t0 = time.perf_counter()
    rep = run_scenario(sc, checks=checks, level=args.level, arity=args.arity, expected=expected)
    _emit(export_report(rep, args.format), args.output)
    if args.timing:
        print(f"elapsed: {time.perf_counter() - t0:.3f}s", file=sys.stderr)
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_generate(args):
    params = {}
    for key in ("group", "q", "n", "p", "fixture", "size"):
        v = getattr(args, key)
        if v is not None:
            params[key] = v
    _emit(dump_scenario(generate_example(args.kind, **params)), args.output)
    return EXIT_OK


def cmd_report(args):
    try:
        rep = report_from_json(Path(args.report).read_text())
    except (OSError, ValueError, KeyError) as exc:
        raise ScenarioError(f"cannot read report {args.report}: {exc}") from None
    _emit(export_report(rep, args.format), args.output)
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_list(args):
    for name in bundled_names():
        print(name)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="internality", description="Binding groups of finite internal covers.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="parse and schema-check a scenario file")
    v.add_argument("scenario", help="YAML file or bundled scenario name")
    v.set_defaults(func=cmd_validate)

    r = sub.add_parser("run", help="run a scenario's checks and print a report")
    r.add_argument("scenario", help="YAML file or bundled scenario name")
    r.add_argument("--level", type=int, help="truncation level (default from the scenario)")
    r.add_argument("--arity", type=int, help="product arity of the categories (default from the scenario)")
    r.add_argument("--checks", help="comma separated subset of: " + ",".join(CHECK_ORDER))
    r.add_argument("--expect-file", help="YAML mapping overriding the scenario's expected values")
    r.add_argument("--format", choices=("json", "text"), default="text")
    r.add_argument("--output", "-o", help="write the report here instead of stdout")
    r.add_argument("--seed", type=int, default=0, help="accepted for reproducibility; runs are deterministic")
    r.add_argument("--timing", action="store_true", help="print elapsed time to stderr")
    r.set_defaults(func=cmd_run)

    g = sub.add_parser("generate", help="write an example scenario")
    g.add_argument("kind", choices=("gset", "vecspace", "pair_quotient", "synthetic_fixture", "trivial"))
    g.add_argument("--group", help="gset: Z<n>, S<n> or GL<n>_<q>")
    g.add_argument("--q", type=int, help="vecspace: field size (prime)")
    g.add_argument("--n", type=int, help="vecspace: dimension")
    g.add_argument("--p", type=int, help="pair_quotient: field size (prime)")
    g.add_argument("--fixture", help="synthetic_fixture: equality, nonstrict_bi, non_proper_chain, cover_not_closed")
    g.add_argument("--size", type=int, help="synthetic_fixture: size parameter")
    g.add_argument("--output", "-o")
    g.set_defaults(func=cmd_generate)

    rp = sub.add_parser("report", help="re-render a JSON report")
    rp.add_argument("report")
    rp.add_argument("--format", choices=("json", "text"), default="text")
    rp.add_argument("--output", "-o")
    rp.set_defaults(func=cmd_report)

    ls = sub.add_parser("list", help="list bundled scenarios and fixtures")
    ls.set_defaults(func=cmd_list)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InternalityError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CapacityError as exc:
        print(f"capacity exceeded: {exc}", file=sys.stderr)
        return EXIT_CAPACITY


if __name__ == "__main__":
    sys.exit(main())
