"""Command-line entry point: ``geolp solve|oracle|compare|gen|bench``.

Exit codes: 0 solved/optimal, 2 unbounded, 3 infeasible, 4 degenerate or
singular selection, 64 usage, 65 unparsable or invalid problem.
"""
from __future__ import annotations

import argparse
import json
import sys

from .geometry import CriterionDirection
from .harness import GenSpec, compare, generate_problem, run_ensemble
from .io import ParseError, emit_ensemble, emit_problem, emit_result, parse_problem_text
from .model import ValidationError, validate
from .oracle import OracleError, Status, enumerate_vertices, simplex_solve
from .solver import SolverOptions, solve

EXIT_OK = 0
EXIT_UNBOUNDED = 2
EXIT_INFEASIBLE = 3
EXIT_DEGENERATE = 4
EXIT_USAGE = 64
EXIT_PARSE = 65

_OUTCOME_EXIT = {
    "solved": EXIT_OK,
    "unbounded": EXIT_UNBOUNDED,
    "degenerate": EXIT_DEGENERATE,
    "singular": EXIT_DEGENERATE,
}
_ORACLE_EXIT = {
    Status.OPTIMAL: EXIT_OK,
    Status.UNBOUNDED: EXIT_UNBOUNDED,
    Status.INFEASIBLE: EXIT_INFEASIBLE,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    problem = parse_problem_text(text)
    validate(problem)
    return problem


def _write(data: bytes, out: str | None = None) -> None:
    if out:
        with open(out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def cmd_solve(args) -> int:
    problem = _load(args.file)
    opts = SolverOptions(
        epsilon=args.epsilon,
        criterion_direction=CriterionDirection(args.criterion),
        verify=not args.no_verify,
    )
    outcome = solve(problem, opts)
    _write(emit_result(outcome, args.format, problem, opts))
    return _OUTCOME_EXIT[outcome.status]


def cmd_oracle(args) -> int:
    problem = _load(args.file)
    method = enumerate_vertices if args.method == "enum" else simplex_solve
    try:
        result = method(problem)
    except OracleError as exc:
        print(f"geolp: oracle failed: {exc}", file=sys.stderr)
        return 1
    _write(emit_result(result, args.format))
    return _ORACLE_EXIT[result.status]


def cmd_compare(args) -> int:
    problem = _load(args.file)
    record = compare(problem, problem_id=args.file)
    _write(emit_result(record, args.format))
    if record.oracle.status is Status.INFEASIBLE:
        return EXIT_INFEASIBLE
    return _OUTCOME_EXIT[record.heuristic.status]


def _spec_from_args(args) -> GenSpec:
    return GenSpec(seed=args.seed, n=args.n, m_inward=args.m_in, m_outward=args.m_out, include_box=args.box)


def cmd_gen(args) -> int:
    problem = generate_problem(_spec_from_args(args))
    _write(emit_problem(problem).encode(), args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.spec_file:
        try:
            with open(args.spec_file, encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read spec file: {exc}") from exc
        items = raw if isinstance(raw, list) else [raw]
        specs = [GenSpec.from_dict({**item, "seed": item.get("seed", args.seed)}) for item in items]
    else:
        specs = [_spec_from_args(args)]
    records, stats = run_ensemble(specs, args.trials, workers=args.workers)
    _write(emit_ensemble(records, stats, args.format), args.out)
    if args.format == "csv" and args.summary:
        sys.stderr.write(emit_result(stats, "text").decode())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="geolp", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="run the geometric heuristic")
    s.add_argument("file")
    s.add_argument("--epsilon", type=float, default=1e-9)
    s.add_argument("--criterion", choices=["printed", "table"], default="table")
    s.add_argument("--no-verify", action="store_true")
    s.add_argument("--format", choices=["json", "text", "csv"], default="text")
    s.set_defaults(func=cmd_solve)

    o = sub.add_parser("oracle", help="solve exactly")
    o.add_argument("file")
    o.add_argument("--method", choices=["enum", "simplex"], default="enum")
    o.add_argument("--format", choices=["json", "text", "csv"], default="text")
    o.set_defaults(func=cmd_oracle)

    c = sub.add_parser("compare", help="heuristic against the exact optimum")
    c.add_argument("file")
    c.add_argument("--format", choices=["json", "text", "csv"], default="text")
    c.set_defaults(func=cmd_compare)

    def gen_args(q):
        q.add_argument("--seed", type=int, default=0)
        q.add_argument("--n", type=int, default=3)
        q.add_argument("--m-in", type=int, default=5)
        q.add_argument("--m-out", type=int, default=3)
        q.add_argument("--box", action=argparse.BooleanOptionalAction, default=True)
        q.add_argument("--out", default=None)

    g = sub.add_parser("gen", help="write a random problem")
    gen_args(g)
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", help="seeded ensemble comparison")
    gen_args(b)
    b.add_argument("--trials", type=int, default=100)
    b.add_argument("--spec-file", default=None)
    b.add_argument("--format", choices=["csv", "json", "text"], default="csv")
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--summary", action="store_true", help="also print statistics to stderr")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"geolp: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, ValidationError) as exc:
        print(f"geolp: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
