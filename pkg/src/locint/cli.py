"""Command line entry point: ``locint run | validate | demo``."""

import argparse
import json
import sys

from . import direct_integral as di
from . import domain as qd
from .errors import CapExceeded, LocintError, ParseError
from .report import to_text
from .scenario import (demo_scenario, emit_report, load_scenario, run_scenario,
                       scenario_from_dict)


def _cmd_run(args):
    sc = load_scenario(args.scenario)
    report = run_scenario(sc, seed=args.seed, timings=args.timings)
    out = emit_report(report, args.format, args.out)
    if args.out is None:
        sys.stdout.write(out)
    return 0 if report.passed else 1


def _cmd_validate(args):
    try:
        with open(args.domain) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as e:
        raise ParseError(f"{args.domain}: line {e.lineno}, column {e.colno}: {e.msg}") from None
    if "measure" in data:
        dint = di.DirectIntegralDomain.from_dict(data)
        reps = {str(p): qd.validate(dint.fibers[p]) for p in dint.atoms}
        reps["assembled"] = qd.validate(dint.assembled)
    else:
        reps = {"domain": qd.validate(qd.from_dict(data))}
    ok = all(r.ok for r in reps.values())
    if args.format == "json":
        body = {k: r.to_dict() for k, r in reps.items()}
        sys.stdout.write(json.dumps({"status": "PASS" if ok else "FAIL", "reports": body},
                                    indent=2, sort_keys=True) + "\n")
    else:
        for k, r in reps.items():
            print(f"{k}: {'PASS' if r.ok else 'FAIL'}  dims={ {str(a): v for a, v in r.dims.items()} }")
            for f in r.failures:
                print(f"  {f}")
    return 0 if ok else 1


def _cmd_demo(args):
    report = run_scenario(scenario_from_dict(demo_scenario()))
    out = emit_report(report, args.format, args.out)
    if args.out is None:
        sys.stdout.write(out)
    return 0 if report.passed else 1


def build_parser():
    ap = argparse.ArgumentParser(prog="locint", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a scenario file")
    r.add_argument("scenario", help="scenario JSON file")
    r.add_argument("--out", help="write the report here instead of stdout")
    r.add_argument("--format", choices=("json", "text"), default="json")
    r.add_argument("--seed", type=int, help="override the scenario seed")
    r.add_argument("--timings", action="store_true", help="record per-task wall time")
    r.set_defaults(func=_cmd_run)
    v = sub.add_parser("validate", help="validate a domain file")
    v.add_argument("domain", help="quantized domain or direct integral JSON file")
    v.add_argument("--format", choices=("json", "text"), default="text")
    v.set_defaults(func=_cmd_validate)
    d = sub.add_parser("demo", help="run the built-in dim-8 and lazy-chain demo")
    d.add_argument("--out")
    d.add_argument("--format", choices=("json", "text"), default="text")
    d.set_defaults(func=_cmd_demo)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, CapExceeded) as e:
        print(f"locint: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    except LocintError as e:
        print(f"locint: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"locint: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
