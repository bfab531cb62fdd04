"""Problem text format and result serialization.

The problem format is line oriented::

    # comment
    max: 0.5 x1 + x2 + 2 x3
    R_1: 2.1 x1 + 3 x2 + x3 <= 5.2
    R_6: x1 >= 0

A ``min:`` objective is negated into a maximization and flagged on the
problem.  The number of variables is the highest ``x<k>`` index seen
anywhere; rows are zero padded to it.  Constraint names are optional and
default to ``R_<line order>``.

Dimensions and rows are reported 1-based in every output format.
"""
from __future__ import annotations

import csv
import io as _io
import json
import re
from typing import Sequence

from .geometry import NOT_CROSSING, bodd
from .harness import ComparisonRecord, Statistics
from .model import ConstraintClass, Constraint, Problem, Sense, canonicalize
from .oracle import OracleResult
from .solver import DegenerateSelection, SingularBasis, Solved, SolverOptions, Unbounded


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}" if line else message)


class UnknownVariable(ParseError):
    pass


class EmptyObjective(ParseError):
    pass


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<rel><=|>=|=<|=>|==|=|<|>)
  | (?P<op>[+\-*])
    """,
    re.VERBOSE,
)
_VAR = re.compile(r"x([1-9]\d*)")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_.\-]*")


def _tokenize(text: str, line: int, offset: int) -> list[tuple[str, str, int]]:
    tokens, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, offset + pos + 1)
        if m.lastgroup != "ws":
            tokens.append((m.lastgroup, m.group(), offset + pos + 1))
        pos = m.end()
    return tokens


class _Cursor:
    def __init__(self, tokens, line: int, end_col: int):
        self.tokens = tokens
        self.i = 0
        self.line = line
        self.end_col = end_col

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, "", self.end_col)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def fail(self, message: str, tok=None, cls=ParseError):
        tok = tok or self.peek()
        raise cls(message, self.line, tok[2])


def _signed_number(cur: _Cursor) -> float:
    sign = 1.0
    while cur.peek()[0] == "op" and cur.peek()[1] in "+-":
        if cur.take()[1] == "-":
            sign = -sign
    kind, text, _ = cur.peek()
    if kind != "num":
        cur.fail("expected a number")
    cur.take()
    return sign * float(text)


def _expression(cur: _Cursor) -> dict[int, float]:
    """``[±] term (± term)*`` with ``term = number [*] x<k> | x<k>``."""
    coefs: dict[int, float] = {}
    first = True
    while True:
        kind, text, _ = cur.peek()
        if kind in (None, "rel"):
            if first:
                return coefs
            cur.fail("expected a term")
        sign = 1.0
        seen_op = False
        while cur.peek()[0] == "op" and cur.peek()[1] in "+-":
            seen_op = True
            if cur.take()[1] == "-":
                sign = -sign
        if not first and not seen_op:
            cur.fail("expected '+' or '-' between terms")
        coef = 1.0
        if cur.peek()[0] == "num":
            coef = float(cur.take()[1])
            if cur.peek()[0] == "op" and cur.peek()[1] == "*":
                cur.take()
        tok = cur.peek()
        if tok[0] != "ident":
            cur.fail("expected a variable x<k>")
        m = _VAR.fullmatch(tok[1])
        if m is None:
            cur.fail(f"unknown variable {tok[1]!r}", tok, UnknownVariable)
        cur.take()
        k = int(m.group(1)) - 1
        coefs[k] = coefs.get(k, 0.0) + sign * coef
        first = False
        if cur.peek()[0] in (None, "rel"):
            return coefs


def parse_problem_text(text: str) -> Problem:
    objective = None
    minimize = False
    rows: list[tuple[str | None, dict[int, float], Sense, float]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        head, colon, rest = body.partition(":")
        if colon:
            label = head.strip()
            offset = len(head) + 1
        else:
            label, rest, offset = None, body, 0
        if label is not None and label.lower() in ("max", "min"):
            if objective is not None:
                raise ParseError("second objective line", lineno, 1)
            cur = _Cursor(_tokenize(rest, lineno, offset), lineno, len(body) + 1)
            objective = _expression(cur)
            if cur.peek()[0] is not None:
                cur.fail("unexpected token after objective")
            if not objective:
                raise EmptyObjective("objective has no terms", lineno, offset + 1)
            minimize = label.lower() == "min"
            continue
        if objective is None:
            raise ParseError("constraint before the objective line", lineno, 1)
        if label is not None and not _NAME.fullmatch(label):
            raise ParseError(f"bad constraint name {label!r}", lineno, 1)
        cur = _Cursor(_tokenize(rest, lineno, offset), lineno, len(body) + 1)
        coefs = _expression(cur)
        if not coefs:
            cur.fail("constraint has no terms")
        kind, rel, _ = cur.peek()
        if kind != "rel":
            cur.fail("expected '<=' or '>='")
        if rel in ("<=", "=<"):
            sense = Sense.LE
        elif rel in (">=", "=>"):
            sense = Sense.GE
        else:
            cur.fail(f"unsupported relation {rel!r}; only <= and >= are allowed")
        cur.take()
        rhs = _signed_number(cur)
        if cur.peek()[0] is not None:
            cur.fail("unexpected token after right-hand side")
        rows.append((label, coefs, sense, rhs))

    if objective is None:
        raise EmptyObjective("no 'max:' or 'min:' line")
    n = 1 + max([max(objective)] + [max(r[1]) for r in rows])

    def dense(coefs: dict[int, float]) -> tuple[float, ...]:
        return tuple(coefs.get(i, 0.0) for i in range(n))

    c = dense(objective)
    if minimize:
        c = tuple(-v for v in c)
    names = tuple(label or f"R_{j + 1}" for j, (label, *_rest) in enumerate(rows))
    constraints = tuple(Constraint(dense(cf), s, rhs) for _, cf, s, rhs in rows)
    return Problem(c, constraints, names, minimize)


def _num(v: float) -> str:
    return repr(float(v))


def _terms(coefs: Sequence[float]) -> str:
    parts = []
    for i, v in enumerate(coefs):
        text = _num(v)
        neg = text.startswith("-")
        mag = text[1:] if neg else text
        if i == 0:
            parts.append(f"{'-' if neg else ''}{mag} x{i + 1}")
        else:
            parts.append(f"{'-' if neg else '+'} {mag} x{i + 1}")
    return " ".join(parts)


def emit_problem(problem: Problem) -> str:
    """Text that :func:`parse_problem_text` reads back field for field.

    Every coefficient is written, zeros included, so ``n`` survives.
    """
    c = [-v for v in problem.c] if problem.minimize else list(problem.c)
    lines = [f"{'min' if problem.minimize else 'max'}: {_terms(c)}"]
    for name, row in zip(problem.names, problem.constraints):
        lines.append(f"{name}: {_terms(row.a)} {row.sense.value} {_num(row.b)}")
    return "\n".join(lines) + "\n"


def _floats(x) -> list[float] | None:
    return None if x is None else [float(v) for v in x]


def _bodmp_dict(hit) -> dict | None:
    if hit is None:
        return None
    return {"index": hit.g + 1, "distance": float(hit.d_g), "point": _floats(hit.point)}


def _selection_dicts(choices) -> list[dict]:
    return [
        {"dim": ch.dim + 1, "row": ch.row + 1, "class": ch.cls.value, "e": float(ch.e)}
        for ch in choices
    ]


def outcome_dict(outcome, problem: Problem | None = None, opts: SolverOptions | None = None) -> dict:
    opts = opts or SolverOptions()
    names = problem.names if problem is not None else None
    d = {
        "status": outcome.status,
        "x": None,
        "z": None,
        "active_rows": [],
        "bodmp": _bodmp_dict(getattr(outcome, "bodmp", None)),
        "selections": [],
        "diagnostics": {"residual": None, "violations": [], "repaired_dims": []},
        "options": opts.as_dict(),
    }
    if isinstance(outcome, Solved):
        d["x"] = _floats(outcome.x_star)
        d["z"] = float(outcome.objective_value)
        d["active_rows"] = [j + 1 for j in outcome.active.basis_rows]
        d["selections"] = _selection_dicts(outcome.active.choices)
        d["diagnostics"]["residual"] = outcome.residual
        d["diagnostics"]["repaired_dims"] = [i + 1 for i in outcome.active.repaired_dims]
        if outcome.feasibility is not None:
            d["diagnostics"]["violations"] = [
                {"row": j + 1, "name": names[j] if names else f"R_{j + 1}", "magnitude": v}
                for j, v in outcome.feasibility.violations
            ]
    elif isinstance(outcome, SingularBasis):
        d["active_rows"] = [j + 1 for j in outcome.active.basis_rows]
        d["selections"] = _selection_dicts(outcome.active.choices)
    elif isinstance(outcome, Unbounded):
        d["selections"] = _selection_dicts(outcome.choices)
        d["dimension"] = outcome.dimension + 1
    elif isinstance(outcome, DegenerateSelection):
        d["selections"] = _selection_dicts(outcome.choices)
        d["dimensions"] = [i + 1 for i in outcome.dimensions]
    return d


def oracle_dict(result: OracleResult) -> dict:
    return {
        "status": result.status.value,
        "x": _floats(result.x_opt),
        "z": result.objective_value,
        "active_rows": [j + 1 for j in result.active_rows],
        "vertex_count": result.vertex_count,
        "method": result.method,
    }


def classification_table(problem: Problem) -> str:
    """Per-row class, stored orientation, ray distance and angle."""
    np_ = canonicalize(problem)
    width = max(len(s) for s in problem.names)
    head = f"{'row':<{width}}  {'type':<7}  {'stored row':<40}  {'d_j':>10}  {'alpha_oj':>9}"
    lines = [head, "-" * len(head)]
    for j in range(np_.m):
        a, b = np_.A[j], float(np_.b[j])
        stored = " ".join(f"{v:g}" for v in a) + f" {np_.stored_sense(j).value} {b:g}"
        if np_.classes[j] is ConstraintClass.INWARD:
            d = bodd(a, b, np_.v_o)
            d_text = "-" if d == NOT_CROSSING else f"{d:.3f}"
        else:
            rate = float(a @ np_.v_o)
            d_text = f"{b / rate:.3f}" if rate != 0 else "-"
        lines.append(
            f"{problem.names[j]:<{width}}  {np_.classes[j].value:<7}  {stored:<40}  "
            f"{d_text:>10}  {np_.angles[j]:>9.3f}"
        )
    lines.append("objective unit normal: (" + ", ".join(f"{v:.3f}" for v in np_.v_o) + ")")
    return "\n".join(lines)


def _outcome_text(outcome, problem: Problem | None, opts: SolverOptions | None) -> str:
    d = outcome_dict(outcome, problem, opts)
    label = (lambda j: problem.names[j - 1]) if problem is not None else (lambda j: f"R_{j}")
    out = []
    if problem is not None:
        out += [classification_table(problem), ""]
    if d["bodmp"] is not None:
        bp = d["bodmp"]
        out.append(
            f"BODMP: {label(bp['index'])} at distance {bp['distance']:.4f}, point ("
            + ", ".join(f"{v:.4f}" for v in bp["point"]) + ")"
        )
    else:
        out.append("BODMP: none (objective ray crosses no inward boundary)")
    for s in d["selections"]:
        out.append(f"  dim {s['dim']}: {label(s['row'])} ({s['class']}, e = {s['e']:.4f})")
    out.append(f"status: {d['status']}")
    if "dimension" in d:
        out.append(f"unbounded along dimension {d['dimension']}")
    if "dimensions" in d:
        out.append("no distinct limiter for dimensions " + ", ".join(map(str, d["dimensions"])))
    if d["x"] is not None:
        out.append("x* = (" + ", ".join(f"{v:.6g}" for v in d["x"]) + ")")
        out.append(f"z* = {d['z']:.6g}")
        out.append(f"residual = {d['diagnostics']['residual']:.3g}")
        if d["diagnostics"]["repaired_dims"]:
            out.append("repaired dims: " + ", ".join(map(str, d["diagnostics"]["repaired_dims"])))
        for v in d["diagnostics"]["violations"]:
            out.append(f"  violates {v['name']} by {v['magnitude']:.6g}")
    return "\n".join(out) + "\n"


def _csv(rows: list[dict]) -> str:
    buf = _io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: ("" if v is None else v) for k, v in r.items()})
    return buf.getvalue()


def _flatten(d: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, list):
            out[key] = json.dumps(v)
        else:
            out[key] = v
    return out


def _stats_text(stats: Statistics) -> str:
    d = stats.as_dict()
    lo, hi = d["match_ci95"]
    lines = [
        f"trials: {d['trials']}",
        f"compared (both sides produced a value): {d['compared']}",
        f"active-set match: {d['match_count']} ({d['match_fraction']:.3f}, 95% CI [{lo:.3f}, {hi:.3f}])",
        f"relative gap < 1e-6: {d['small_gap_count']} ({d['small_gap_fraction']:.3f})",
        f"heuristic answer infeasible: {d['infeasible_count']} ({d['infeasible_fraction']:.3f})",
        f"criterion direction flip rate: {d['direction_flip_rate']:.3f}",
        f"row rescaling flip rate: {d['rescale_flip_rate']:.3f}",
        f"objective scaling flips: {d['objective_scale_flips']}",
        f"unbounded verdicts on boxed instances: {d['boxed_unbounded']}",
        f"match with gap >= 1e-8: {d['match_gap_violations']}",
        "relative gap quantiles: "
        + ", ".join(f"q{q}={v:.4g}" for q, v in d["rel_gap_quantiles"].items()),
        "status counts (heuristic/oracle): "
        + ", ".join(f"{k}={v}" for k, v in d["status_counts"].items()),
    ]
    return "\n".join(lines) + "\n"


def emit_result(obj, fmt: str = "json", problem: Problem | None = None, opts: SolverOptions | None = None) -> bytes:
    """Serialize an outcome, oracle result, record(s) or statistics.

    ``fmt`` is ``json``, ``csv`` or ``text``.  JSON key order is fixed.
    """
    if fmt not in ("json", "csv", "text"):
        raise ValueError(f"unknown format {fmt!r}")
    if isinstance(obj, (Solved, Unbounded, DegenerateSelection, SingularBasis)):
        d = outcome_dict(obj, problem, opts)
        if fmt == "text":
            return _outcome_text(obj, problem, opts).encode()
    elif isinstance(obj, OracleResult):
        d = oracle_dict(obj)
        if fmt == "text":
            lines = [f"status: {d['status']} ({d['method']})"]
            if d["x"] is not None:
                lines += ["x = (" + ", ".join(f"{v:.6g}" for v in d["x"]) + ")", f"z = {d['z']:.6g}",
                          "active rows: " + ", ".join(map(str, d["active_rows"]))]
            return ("\n".join(lines) + "\n").encode()
    elif isinstance(obj, ComparisonRecord):
        d = obj.row()
        if fmt == "text":
            return "".join(f"{k}: {v}\n" for k, v in d.items()).encode()
    elif isinstance(obj, Statistics):
        d = obj.as_dict()
        if fmt == "text":
            return _stats_text(obj).encode()
    elif isinstance(obj, (list, tuple)) and all(isinstance(r, ComparisonRecord) for r in obj):
        rows = [r.row() for r in obj]
        if fmt == "csv":
            return _csv(rows).encode()
        if fmt == "text":
            return "".join(
                f"{r['problem_id']}: {r['heuristic_status']}/{r['oracle_status']} gap={r['z_gap']}\n"
                for r in rows
            ).encode()
        return (json.dumps(rows, indent=2) + "\n").encode()
    else:
        raise TypeError(f"cannot emit {type(obj).__name__}")
    if fmt == "csv":
        return _csv([_flatten(d)]).encode()
    return (json.dumps(d, indent=2) + "\n").encode()


def emit_ensemble(records, stats: Statistics, fmt: str = "csv") -> bytes:
    """Bench output: records one per line for CSV, both parts for JSON."""
    if fmt == "csv":
        return emit_result(list(records), "csv")
    if fmt == "text":
        return emit_result(stats, "text")
    payload = {"statistics": stats.as_dict(), "records": [r.row() for r in records]}
    return (json.dumps(payload, indent=2) + "\n").encode()
