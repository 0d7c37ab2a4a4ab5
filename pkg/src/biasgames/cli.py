"""Command line entry point: ``biasgames {bounds,scan,strategy,verify}``.

Exit codes: 0 success, 1 usage error, 2 verification failure,
3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import analysis, linalg, quantum, verify
from .games import BiasVector, bell_from_probability, check_arity, coefficient_table, game_by_name
from .simplex import LPError

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_NUMERIC = 0, 1, 2, 3
SCHEMA = 1
DEFAULT_SEED = 0


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--game", choices=["chsh", "svetlichny"], default="chsh")
    common.add_argument("--p", type=float)
    common.add_argument("--q", type=float)
    common.add_argument("--r", type=float)
    common.add_argument("--restarts", type=int, default=None,
                        help="see-saw restarts (default 20; 0 for scans)")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--out", type=Path, help="write output here instead of stdout")
    common.add_argument("--format", choices=["csv", "json", "svg"])
    common.add_argument("--bell", action="store_true", help="report Bell values instead of probabilities")

    parser = _Parser(prog="biasgames", description="Bounds for biased CHSH and Svetlichny games.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("bounds", parents=[common], help="all bounds at one bias point")
    scan = sub.add_parser("scan", parents=[common], help="classify a grid of bias points")
    scan.add_argument("--resolution", type=int, default=21)
    sub.add_parser("strategy", parents=[common], help="explicit quantum strategy and its value")
    ver = sub.add_parser("verify", parents=[common], help="run the property suites")
    ver.add_argument("--resolution", type=int, default=20, help="see-saw grid size per axis")
    return parser


def _bias(args, game) -> BiasVector:
    if args.p is None or args.q is None:
        raise UsageError("--p and --q are required")
    if game.parties == 3 and args.r is None:
        raise UsageError("--r is required for the svetlichny game")
    if game.parties == 2 and args.r is not None:
        raise UsageError("--r is only valid for the svetlichny game")
    try:
        bias = BiasVector(args.p, args.q, args.r)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    check_arity(game, bias)
    return bias


def _emit(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        try:
            Path(out).write_text(text)
        except OSError as exc:
            raise UsageError(f"cannot write {out}: {exc}") from None


def _dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def cmd_bounds(args) -> int:
    game = game_by_name(args.game)
    bias = _bias(args, game)
    restarts = 20 if args.restarts is None else args.restarts
    pt = analysis.classify_point(game, bias, restarts=restarts, seed=args.seed)
    fmt = args.format or "json"
    if fmt == "csv":
        import csv
        import io

        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(analysis.CSV_HEADER)
        w.writerow(pt.row(args.bell))
        _emit(buf.getvalue(), args.out)
    elif fmt == "json":
        doc = {"schema": SCHEMA, "game": game.name, "restarts": restarts, "seed": args.seed,
               "analytic_model": "bipartite" if game.parties == 2 else "bipartition", **pt.to_dict(args.bell)}
        _emit(_dumps(doc), args.out)
    else:
        raise UsageError("bounds supports csv or json output")
    return EXIT_OK


def cmd_scan(args) -> int:
    game = game_by_name(args.game)
    if args.resolution < 2:
        raise UsageError("--resolution must be at least 2")
    if game.parties == 2 and args.r is not None:
        raise UsageError("--r is only valid for the svetlichny game")
    restarts = 0 if args.restarts is None else args.restarts
    fmt = args.format or "csv"
    if fmt == "svg" and game.parties == 3 and args.r is None:
        raise UsageError("svg output for svetlichny needs a fixed --r slice")
    diagram = analysis.scan_grid(game, args.resolution, r=args.r, restarts=restarts, seed=args.seed,
                                 jobs=args.jobs)
    if fmt == "csv":
        _emit(diagram.to_csv(args.bell), args.out)
    elif fmt == "svg":
        _emit(diagram.to_svg(), args.out)
    else:
        doc = {"schema": SCHEMA, "game": game.name, "resolution": args.resolution, "r": args.r,
               "points": [pt.to_dict(args.bell) for pt in diagram.points],
               "boundary": [list(b) for b in diagram.boundary]}
        _emit(_dumps(doc), args.out)
    return EXIT_OK


def cmd_strategy(args) -> int:
    game = game_by_name(args.game)
    bias = _bias(args, game)
    restarts = 20 if args.restarts is None else args.restarts
    canonical, relabel = analysis.canonicalize_bias(bias)
    table = coefficient_table(game, bias)
    analytic, region = analysis.analytic_quantum(game, canonical)
    doc = {"schema": SCHEMA, "game": game.name, **bias.to_dict(), "region_id": region}
    if game.parties == 2:
        res = quantum.seesaw_optimize(coefficient_table(game, canonical), restarts=restarts, seed=args.seed)
        strat = relabel.restore(res.strategy)
        doc["source"] = "seesaw"
        doc["converged"] = res.converged
    else:
        strat = relabel.restore(quantum.ghz_bipartition_strategy(canonical))
        full = quantum.seesaw_optimize(table, restarts=restarts, seed=args.seed)
        doc["source"] = "ghz_bipartition"
        doc["converged"] = True
        doc["full_seesaw_value"] = _units((1 + full.value) / 2, args.bell)
    bell = quantum.quantum_value(table, strat)
    doc["value"] = _units((1 + bell) / 2, args.bell)
    doc["analytic_bound"] = _units((1 + analytic) / 2, args.bell)
    doc["matches_analytic"] = abs(bell - analytic) <= 1e-6
    doc["units"] = "bell" if args.bell else "probability"
    doc["strategy"] = strat.to_dict()
    if not doc["converged"]:
        print("warning: see-saw hit the iteration cap; value reported is best so far", file=sys.stderr)
    _emit(_dumps(doc), args.out)
    if not doc["converged"] and not doc["matches_analytic"]:
        return EXIT_NUMERIC
    return EXIT_OK


def _units(prob: float, bell: bool) -> float:
    return bell_from_probability(prob) if bell else prob


def cmd_verify(args) -> int:
    restarts = 20 if args.restarts is None else args.restarts
    if restarts < 1:
        raise UsageError("--restarts must be >= 1 for verify")
    cfg = verify.VerifyConfig(seed=args.seed, restarts=restarts, grid=args.resolution)
    results = verify.run_suites(cfg)
    sys.stdout.write(verify.report_table(results))
    if args.out is not None:
        _emit(verify.report_json(cfg, results), args.out)
    failed = [r.name for r in results if not r.passed]
    if failed:
        print("failed: " + "; ".join(failed), file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


COMMANDS = {"bounds": cmd_bounds, "scan": cmd_scan, "strategy": cmd_strategy, "verify": cmd_verify}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"biasgames: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (linalg.ConvergenceError, LPError, RuntimeError) as exc:
        print(f"biasgames: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"biasgames: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
