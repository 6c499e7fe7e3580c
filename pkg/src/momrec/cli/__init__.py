"""Command-line interface: ``solve``, ``bench``, ``verify`` and ``dump-sdp``.

Exit codes for ``solve``: 0 recovered, 1 unreadable or invalid input,
2 no flat truncation up to the last order, 3 infeasible, 4 solver failure.
``verify`` returns 0 on pass and 5 on failure.

Default tolerances can be overridden through ``MOMREC_RANK_TOL``,
``MOMREC_ATOM_TOL``, ``MOMREC_MERGE_TOL``, ``MOMREC_ZERO_TOL`` and
``MOMREC_VERIFY_TOL``; flags beat problem-file options, which beat the
environment.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from .bench import format_table, run_bench
from .commands import (EXIT_PARSE, cmd_dump_sdp, cmd_solve, cmd_verify, solve_spec,
                       verify_documents)
from .formats import FormatError, load_problem, load_result, parse_problem, write_json

__all__ = ["main", "cmd_solve", "cmd_verify", "cmd_dump_sdp", "run_bench", "solve_spec",
           "verify_documents", "load_problem", "load_result", "parse_problem", "FormatError"]


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="momrec", description="Moment and tensor recovery by moment relaxations.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log solver progress")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve a problem file")
    s.add_argument("file")
    s.add_argument("--order-min", type=int, default=None)
    s.add_argument("--order-max", type=int, default=None)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--tol", type=float, default=None, help="rank tolerance for flat truncation")
    s.add_argument("--out", default=None, help="result file (default: stdout)")

    b = sub.add_parser("bench", help="random-instance benchmark of recovered lengths")
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--d", type=int, required=True)
    b.add_argument("--m", type=int, required=True)
    b.add_argument("--trials", type=int, default=20)
    b.add_argument("--mode", choices=["mrp", "trp-general"], default="mrp")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--b-normal", action="store_true", help="trp-general: draw b standard normal")
    b.add_argument("--sphere-samples", action="store_true", help="mrp: project sample points onto the sphere")
    b.add_argument("--order-max", type=int, default=None)
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--json", default=None, help="also write the full summary as JSON")

    v = sub.add_parser("verify", help="recheck a result file against its problem")
    v.add_argument("result")
    v.add_argument("problem")
    v.add_argument("--tol", type=float, default=None, help="functional residual tolerance")
    v.add_argument("--atom-tol", type=float, default=None, help="membership tolerance")

    d = sub.add_parser("dump-sdp", help="write the order-k relaxation in the sparse text format")
    d.add_argument("file")
    d.add_argument("--order", type=int, required=True)
    d.add_argument("--seed", type=int, default=None)
    d.add_argument("--out", default=None)
    return ap


def main(argv=None) -> int:
    ap = _parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        if args.command == "solve":
            code, doc = cmd_solve(args.file, args.seed, args.order_min, args.order_max, args.tol)
            text = write_json(doc, args.out)
            if args.out is None:
                sys.stdout.write(text)
            else:
                print(f"{doc['status']}: r = {doc['r']}, functional residual = {doc['residuals']['functional']}")
            return code
        if args.command == "bench":
            summary = run_bench(args.n, args.d, args.m, args.trials, args.mode, args.seed, args.b_normal,
                                args.workers, args.order_max, args.sphere_samples)
            print(format_table(summary))
            if args.json:
                write_json(summary, args.json)
            return 0
        if args.command == "verify":
            code, report = cmd_verify(args.result, args.problem, args.tol, args.atom_tol)
            print(json.dumps(report, indent=2))
            return code
        if args.command == "dump-sdp":
            code, text = cmd_dump_sdp(args.file, args.order, args.seed)
            if args.out:
                with open(args.out, "w", encoding="utf-8") as fh:
                    fh.write(text)
            else:
                sys.stdout.write(text)
            return code
    except (FormatError, OSError) as err:
        print(f"momrec: error: {err}", file=sys.stderr)
        return EXIT_PARSE
    except ValueError as err:
        print(f"momrec: error: {err}", file=sys.stderr)
        return EXIT_PARSE
    return EXIT_PARSE
