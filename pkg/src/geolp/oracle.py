"""Exact LP solvers used as ground truth for the heuristic.

Two independent routes: brute-force vertex enumeration (desk scale only)
and a dense two-phase tableau simplex with Bland's rule.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .linalg import PIVOT_TOL, SingularMatrixError, solve_square
from .model import Problem, Sense

FEAS_TOL = 1e-7
ENUM_CAP = 200_000
PIVOT_CAP = 50_000


class Status(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class OracleError(RuntimeError):
    pass


class BudgetExceeded(OracleError):
    pass


class NotPointed(OracleError):
    """The feasible set has no vertex, so enumeration cannot decide it."""


class IterationCap(OracleError):
    pass


@dataclass(frozen=True, eq=False)
class OracleResult:
    status: Status
    x_opt: np.ndarray | None = None
    z_opt: float | None = None
    active_rows: tuple[int, ...] = ()
    vertex_count: int = 0
    method: str = ""
    minimize: bool = False

    @property
    def objective_value(self) -> float | None:
        if self.z_opt is None:
            return None
        return -self.z_opt if self.minimize else self.z_opt


@dataclass(frozen=True, eq=False)
class FeasibilityReport:
    """Per-row signed slack (negative means violated) and the violations."""

    slacks: np.ndarray
    violations: tuple[tuple[int, float], ...]
    max_violation: float
    tol: float

    @property
    def feasible(self) -> bool:
        return not self.violations


def check_feasibility(problem: Problem, x, tol: float = FEAS_TOL) -> FeasibilityReport:
    x = np.asarray(x, dtype=float)
    if problem.m == 0:
        return FeasibilityReport(np.zeros(0), (), 0.0, tol)
    lhs = problem.A @ x
    slack = np.where(
        [r.sense is Sense.LE for r in problem.constraints], problem.b - lhs, lhs - problem.b
    )
    bad = tuple((j, float(-s)) for j, s in enumerate(slack) if s < -tol)
    worst = float(max(0.0, -float(np.min(slack))))
    return FeasibilityReport(slack, bad, worst, tol)


def _binding(A: np.ndarray, b: np.ndarray, x: np.ndarray, tol: float) -> tuple[int, ...]:
    return tuple(int(j) for j in np.flatnonzero(np.abs(A @ x - b) <= tol))


def _has_improving_ray(A: np.ndarray, c: np.ndarray, tol: float, pivot_tol: float) -> bool:
    """Whether the pointed cone ``{d : A d <= 0}`` has an extreme ray with
    ``c.d > 0``.  Each extreme ray is the null direction of ``n - 1``
    independent rows."""
    m, n = A.shape
    scale = float(np.max(np.linalg.norm(A, axis=1)))
    for idx in itertools.combinations(range(m), n - 1):
        if n == 1:
            basis_dirs = [np.ones(1)]
        else:
            M = A[list(idx)]
            _, s, vt = np.linalg.svd(M)
            if s[-1] < pivot_tol * scale:
                continue
            basis_dirs = [vt[-1]]
        for r in basis_dirs:
            for d in (r, -r):
                if np.all(A @ d <= tol) and float(c @ d) > tol:
                    return True
    return False


def enumerate_vertices(
    problem: Problem,
    tol: float = FEAS_TOL,
    cap: int = ENUM_CAP,
    pivot_tol: float = PIVOT_TOL,
) -> OracleResult:
    """Best feasible vertex over every ``n``-subset of rows.

    Raises :class:`BudgetExceeded` when ``C(m, n) > cap`` and
    :class:`NotPointed` when the rows do not span ``R^n``.
    ``vertex_count`` counts feasible basic solutions (a degenerate vertex
    is counted once per defining subset).
    """
    A, b = problem.as_le()
    c = np.asarray(problem.c, dtype=float)
    m, n = A.shape
    if m < n or np.linalg.matrix_rank(A) < n:
        raise NotPointed("constraint rows do not span the space")
    total = math.comb(m, n)
    if total > cap:
        raise BudgetExceeded(f"C({m},{n}) = {total} exceeds cap {cap}")

    best_x, best_z, count = None, -math.inf, 0
    for idx in itertools.combinations(range(m), n):
        sel = list(idx)
        try:
            x = solve_square(A[sel], b[sel], pivot_tol)
        except SingularMatrixError:
            continue
        if np.any(A @ x - b > tol):
            continue
        count += 1
        z = float(c @ x)
        if z > best_z:
            best_x, best_z = x, z

    if best_x is None:
        return OracleResult(Status.INFEASIBLE, vertex_count=0, method="enum", minimize=problem.minimize)
    if math.comb(m, n - 1) > cap:
        raise BudgetExceeded("extreme-ray check exceeds cap")
    if _has_improving_ray(A, c, tol, pivot_tol):
        return OracleResult(Status.UNBOUNDED, vertex_count=count, method="enum", minimize=problem.minimize)
    best_x.setflags(write=False)
    return OracleResult(
        Status.OPTIMAL,
        best_x,
        best_z,
        _binding(A, b, best_x, tol),
        count,
        "enum",
        problem.minimize,
    )


class _Tableau:
    """Dense tableau; the last row holds reduced costs (``z - c.x = 0``
    form, so a negative entry marks an improving column)."""

    def __init__(self, T: np.ndarray, basis: list[int], tol: float, cap: int):
        self.T = T
        self.basis = basis
        self.tol = tol
        self.cap = cap
        self.pivots = 0

    def set_objective(self, cost: np.ndarray) -> None:
        T = self.T
        T[-1, :] = 0.0
        T[-1, : len(cost)] = -cost
        for i, j in enumerate(self.basis):
            if T[-1, j] != 0.0:
                T[-1, :] -= T[-1, j] * T[i, :]

    def pivot(self, r: int, j: int) -> None:
        T = self.T
        T[r, :] /= T[r, j]
        for i in range(T.shape[0]):
            if i != r and T[i, j] != 0.0:
                T[i, :] -= T[i, j] * T[r, :]
        self.basis[r] = j
        self.pivots += 1
        if self.pivots > self.cap:
            raise IterationCap(f"more than {self.cap} pivots")

    def run(self, ncols: int) -> bool:
        """Bland's rule on the first ``ncols`` columns; False if unbounded."""
        T = self.T
        while True:
            enter = next((j for j in range(ncols) if T[-1, j] < -self.tol), None)
            if enter is None:
                return True
            col = T[:-1, enter]
            rows = [i for i in range(len(col)) if col[i] > self.tol]
            if not rows:
                return False
            ratios = [(T[i, -1] / col[i], self.basis[i], i) for i in rows]
            best = min(r for r, _, _ in ratios)
            # Bland: among (near-)tied ratios leave by the smallest basic index
            tied = [(bv, i) for r, bv, i in ratios if r <= best + self.tol]
            self.pivot(min(tied)[1], enter)


def simplex_solve(
    problem: Problem,
    tol: float = FEAS_TOL,
    max_pivots: int = PIVOT_CAP,
    pivot_tol: float = 1e-9,
) -> OracleResult:
    """Two-phase dense tableau simplex on free variables ``x = x+ - x-``."""
    A, b = problem.as_le()
    c = np.asarray(problem.c, dtype=float)
    m, n = A.shape
    neg = [i for i in range(m) if b[i] < 0]
    k = len(neg)
    nv = 2 * n + m  # x+, x-, slacks
    T = np.zeros((m + 1, nv + k + 1))
    basis = []
    for i in range(m):
        sign = -1.0 if b[i] < 0 else 1.0
        T[i, :n] = sign * A[i]
        T[i, n: 2 * n] = -sign * A[i]
        T[i, 2 * n + i] = sign
        T[i, -1] = sign * b[i]
    for a_col, i in enumerate(neg):
        T[i, nv + a_col] = 1.0
    for i in range(m):
        basis.append(nv + neg.index(i) if i in neg else 2 * n + i)

    tab = _Tableau(T, basis, pivot_tol, max_pivots)
    if k:
        phase1 = np.zeros(nv + k)
        phase1[nv:] = -1.0
        tab.set_objective(phase1)
        tab.run(nv + k)
        if tab.T[-1, -1] < -tol:
            return OracleResult(Status.INFEASIBLE, method="simplex", minimize=problem.minimize)
        # drive zero-level artificials out of the basis; drop redundant rows
        r = 0
        while r < len(tab.basis):
            if tab.basis[r] >= nv:
                j = next((j for j in range(nv) if abs(tab.T[r, j]) > pivot_tol), None)
                if j is None:
                    tab.T = np.delete(tab.T, r, axis=0)
                    del tab.basis[r]
                    continue
                tab.pivot(r, j)
            r += 1
        tab.T = np.delete(tab.T, np.s_[nv: nv + k], axis=1)

    cost = np.concatenate([c, -c, np.zeros(m)])
    tab.set_objective(cost)
    if not tab.run(nv):
        return OracleResult(Status.UNBOUNDED, method="simplex", minimize=problem.minimize)

    values = np.zeros(nv)
    for i, j in enumerate(tab.basis):
        values[j] = tab.T[i, -1]
    x = values[:n] - values[n: 2 * n]
    x.setflags(write=False)
    return OracleResult(
        Status.OPTIMAL,
        x,
        float(c @ x),
        _binding(A, b, x, tol),
        0,
        "simplex",
        problem.minimize,
    )


def solve_exact(problem: Problem, tol: float = FEAS_TOL, cap: int = ENUM_CAP) -> OracleResult:
    """Enumeration when it can decide the instance, simplex otherwise."""
    try:
        return enumerate_vertices(problem, tol, cap)
    except (BudgetExceeded, NotPointed):
        return simplex_solve(problem, tol)
