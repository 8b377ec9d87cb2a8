"""Command-line entry point: ``slidingcenter run|gen|report``."""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from .exceptions import RejectedInput
from .harness import MODES, STREAM_KINDS, RunConfig, Session, gen_stream, run, write_csv
from .k_center import SOLVERS


def _config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        mode=args.mode,
        window_size=args.window,
        k=args.k,
        epsilon=args.epsilon,
        lowdim_t=args.t,
        doubling_exponent=args.doubling_exponent,
        solver=args.solver,
        query_every=args.query_every,
        oracle_checks=args.oracle_checks,
        tolerance=args.tolerance,
        input_format=args.format,
        seed=args.seed,
    ).validate()


def cmd_run(args: argparse.Namespace) -> int:
    if args.snapshot_in:
        with open(args.snapshot_in, "rb") as fh:
            session = Session.restore(fh.read())
        cfg = session.cfg
    else:
        cfg = _config(args)
        session = Session(cfg)
    source = open(args.input, "rb") if args.input != "-" else sys.stdin.buffer
    out = open(args.output, "w") if args.output else sys.stdout
    records = []
    try:
        for rec in run(cfg, source, session):
            out.write(rec.to_json() + "\n")
            if args.figures:
                records.append(json.loads(rec.to_json()))
    finally:
        if source is not sys.stdin.buffer:
            source.close()
        if out is not sys.stdout:
            out.close()
    if args.snapshot_out:
        with open(args.snapshot_out, "wb") as fh:
            fh.write(session.snapshot())
    if args.figures:
        from .report import render

        for path in render(records, args.figures, title=cfg.mode):
            print(path, file=sys.stderr)
    return 0


def cmd_gen(args: argparse.Namespace) -> int:
    params = {"n": args.n, "d": args.d}
    for item in args.param:
        key, _, value = item.partition("=")
        params[key] = float(value)
    write_csv(gen_stream(args.kind, params, args.seed), sys.stdout)
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    from .report import read_records, render

    with open(args.records) as fh:
        records = read_records(fh)
    for path in render(records, args.out_dir, title=args.title):
        print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="slidingcenter", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="ingest a stream and emit NDJSON query records")
    r.add_argument("input", nargs="?", default="-", help="input file, '-' for stdin")
    r.add_argument("--mode", choices=MODES, default="one_center")
    r.add_argument("--window", type=int, default=100)
    r.add_argument("--k", type=int, default=1)
    r.add_argument("--epsilon", type=float, default=0.1)
    r.add_argument("--t", type=int, default=0)
    r.add_argument("--doubling-exponent", type=float, default=None)
    r.add_argument("--solver", choices=SOLVERS, default="greedy_c2")
    r.add_argument("--query-every", type=int, default=1)
    r.add_argument("--oracle-checks", action="store_true")
    r.add_argument("--tolerance", type=float, default=1e-9)
    r.add_argument("--format", choices=("csv", "ndjson"), default="csv")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--snapshot-out", metavar="FILE")
    r.add_argument("--snapshot-in", metavar="FILE")
    r.add_argument("--output", "-o", metavar="FILE", help="write records here instead of stdout")
    r.add_argument("--figures", metavar="DIR", help="also render plots of the records into DIR")
    r.set_defaults(func=cmd_run)

    g = sub.add_parser("gen", help="write a synthetic stream as CSV")
    g.add_argument("kind", choices=STREAM_KINDS)
    g.add_argument("--n", type=int, default=1000)
    g.add_argument("--d", type=int, default=2)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    g.set_defaults(func=cmd_gen)

    p = sub.add_parser("report", help="render plots from an NDJSON record file")
    p.add_argument("records")
    p.add_argument("--out-dir", default="figures")
    p.add_argument("--title", default="")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (RejectedInput, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
