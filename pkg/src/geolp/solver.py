"""The non-iterative pipeline: classify, locate the BODMP, pick one limiting
constraint per dimension, and intersect the picked rows.

:func:`solve` never raises for an unbounded or degenerate instance; those
come back as outcome values.  Nothing here checks optimality.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import ClassVar, Union

import numpy as np

from .geometry import (
    DEFAULT_EPSILON,
    BodmpResult,
    CriterionDirection,
    LimiterChoice,
    NoInwardCrossing,
    bodmp,
    choose_limiter,
)
from .linalg import PIVOT_TOL, SingularMatrixError, solve_square
from .model import NormalizedProblem, Problem, canonicalize


@dataclass(frozen=True)
class SolverOptions:
    epsilon: float = DEFAULT_EPSILON
    criterion_direction: CriterionDirection = CriterionDirection.TABLE
    verify: bool = True
    pivot_tol: float = PIVOT_TOL
    feasibility_tol: float = 1e-7

    def as_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "criterion_direction": self.criterion_direction.value,
            "verify": self.verify,
        }


@dataclass(frozen=True, eq=False)
class ActiveSet:
    choices: tuple[LimiterChoice, ...]
    basis_rows: tuple[int, ...]
    B: np.ndarray
    b_vec: np.ndarray

    @property
    def repaired_dims(self) -> tuple[int, ...]:
        return tuple(c.dim for c in self.choices if c.repaired)

    @property
    def selections(self) -> tuple[int, ...]:
        return tuple(c.row for c in self.choices)


@dataclass(frozen=True, eq=False)
class Solved:
    status: ClassVar[str] = "solved"
    x_star: np.ndarray
    z_star: float
    active: ActiveSet
    bodmp: BodmpResult | None
    residual: float
    feasibility: object | None = None
    minimize: bool = False

    @property
    def objective_value(self) -> float:
        """``z_star`` in the caller's sense (negated back for minimization)."""
        return -self.z_star if self.minimize else self.z_star


@dataclass(frozen=True)
class Unbounded:
    status: ClassVar[str] = "unbounded"
    dimension: int
    bodmp: BodmpResult | None = None
    choices: tuple[LimiterChoice, ...] = field(default=())


@dataclass(frozen=True)
class DegenerateSelection:
    status: ClassVar[str] = "degenerate"
    dimensions: tuple[int, ...]
    bodmp: BodmpResult | None = None
    choices: tuple[LimiterChoice, ...] = field(default=())


@dataclass(frozen=True)
class SingularBasis:
    status: ClassVar[str] = "singular"
    active: ActiveSet
    bodmp: BodmpResult | None = None


SolveOutcome = Union[Solved, Unbounded, DegenerateSelection, SingularBasis]


def _repair(choices: list[LimiterChoice]) -> tuple[list[LimiterChoice], list[int]]:
    # a dimension whose limiter was already taken falls back to its
    # next-ranked candidate not yet in the basis
    used: set[int] = set()
    out, stuck = [], []
    for ch in choices:
        if ch.row not in used:
            used.add(ch.row)
            out.append(ch)
            continue
        alt = next(((e, j) for e, j in ch.ranked if j not in used), None)
        if alt is None:
            stuck.append(ch.dim)
            out.append(ch)
            continue
        used.add(alt[1])
        out.append(
            LimiterChoice(ch.dim, alt[1], ch.cls, alt[0], ch.candidates, ch.ranked, repaired=True)
        )
    return out, stuck


def select_active_set(
    np_: NormalizedProblem,
    reference,
    opts: SolverOptions = SolverOptions(),
    use_inward: bool = True,
) -> ActiveSet | Unbounded | DegenerateSelection:
    """Choose one limiting row per dimension, measured from ``reference``.

    ``reference`` is the BODMP point (or the origin when there is none, with
    ``use_inward=False``).  Stops at the first dimension with no candidate.
    """
    point = np.asarray(reference, dtype=float)
    choices = []
    for i in range(np_.n):
        ch = choose_limiter(
            i, np_, point, opts.epsilon, opts.criterion_direction, inward=use_inward
        )
        if ch is None:
            return Unbounded(i, choices=tuple(choices))
        choices.append(ch)
    choices, stuck = _repair(choices)
    if stuck:
        return DegenerateSelection(tuple(stuck), choices=tuple(choices))
    rows = tuple(ch.row for ch in choices)
    B = np_.A[list(rows)].copy()
    b_vec = np_.b[list(rows)].copy()
    return ActiveSet(tuple(choices), rows, B, b_vec)


def solve_vertex(active: ActiveSet, pivot_tol: float = PIVOT_TOL) -> np.ndarray:
    """Intersect the basis rows; raises ``SingularMatrixError``."""
    return solve_square(active.B, active.b_vec, pivot_tol)


def evaluate_objective(c, x) -> float:
    return float(np.dot(np.asarray(c, dtype=float), np.asarray(x, dtype=float)))


def solve(problem: Problem, opts: SolverOptions = SolverOptions()) -> SolveOutcome:
    np_ = canonicalize(problem)
    try:
        hit = bodmp(np_)
        reference, use_inward = hit.point, True
    except NoInwardCrossing:
        hit, reference, use_inward = None, np.zeros(np_.n), False

    active = select_active_set(np_, reference, opts, use_inward=use_inward)
    if isinstance(active, Unbounded):
        return Unbounded(active.dimension, hit, active.choices)
    if isinstance(active, DegenerateSelection):
        return DegenerateSelection(active.dimensions, hit, active.choices)

    try:
        x = solve_vertex(active, opts.pivot_tol)
    except SingularMatrixError:
        return SingularBasis(active, hit)
    x.setflags(write=False)
    residual = float(np.max(np.abs(active.B @ x - active.b_vec)))
    report = None
    if opts.verify:
        from .oracle import check_feasibility

        report = check_feasibility(problem, x, opts.feasibility_tol)
    return Solved(
        x_star=x,
        z_star=evaluate_objective(problem.c, x),
        active=active,
        bodmp=hit,
        residual=residual,
        feasibility=report,
        minimize=problem.minimize,
    )
