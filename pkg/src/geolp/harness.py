"""Seeded random instances and heuristic-versus-oracle statistics.

Every trial is regenerated from ``(seed, index)`` alone, so any record of an
ensemble can be reproduced in isolation.  Gaps are reported as measured;
nothing here corrects the heuristic.
"""
from __future__ import annotations

import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .model import Constraint, Problem, Sense, canonicalize
from .oracle import OracleResult, Status, check_feasibility, solve_exact
from .solver import ActiveSet, SolveOutcome, Solved, SolverOptions, Unbounded, select_active_set, solve
from .geometry import CriterionDirection, NoInwardCrossing, bodmp

MATCH_TOL = 1e-8
GAP_BIN = 1e-6


class ResampleBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class GenSpec:
    """Recipe for one random maximization instance.

    The first ``min(m_outward, n)`` outward rows are non-negativity bounds;
    any further ones are random ``>=`` rows with non-positive resource.
    ``include_box`` appends ``x_i <= box_upper`` for every dimension.
    """

    seed: int = 0
    n: int = 3
    m_inward: int = 5
    m_outward: int = 3
    coef_range: tuple[float, float] = (-1.0, 4.0)
    resource_range: tuple[float, float] = (1.0, 10.0)
    objective_range: tuple[float, float] = (0.1, 2.0)
    include_box: bool = True
    box_upper: float = 10.0
    max_resample: int = 1000

    def with_seed(self, seed: int) -> "GenSpec":
        return replace(self, seed=seed)

    def as_dict(self) -> dict:
        return {
            "seed": self.seed, "n": self.n, "m_inward": self.m_inward,
            "m_outward": self.m_outward, "coef_range": list(self.coef_range),
            "resource_range": list(self.resource_range),
            "objective_range": list(self.objective_range),
            "include_box": self.include_box, "box_upper": self.box_upper,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GenSpec":
        d = dict(d)
        for key in ("coef_range", "resource_range", "objective_range"):
            if key in d:
                d[key] = tuple(d[key])
        return cls(**d)


def _draw_row(rng, spec: GenSpec, c: np.ndarray, sign: float) -> np.ndarray:
    lo, hi = spec.coef_range
    for _ in range(spec.max_resample):
        a = np.round(rng.uniform(lo, hi, spec.n), 3)
        if np.any(a) and sign * float(a @ c) > 0:
            return a
    raise ResampleBudgetExceeded(f"no admissible row after {spec.max_resample} draws")


def generate_problem(spec: GenSpec) -> Problem:
    rng = np.random.default_rng(spec.seed)
    c = np.round(rng.uniform(*spec.objective_range, spec.n), 3)
    rows = []
    for _ in range(spec.m_inward):
        a = _draw_row(rng, spec, c, +1.0)
        rows.append(Constraint(a, Sense.LE, round(float(rng.uniform(*spec.resource_range)), 3)))
    for k in range(spec.m_outward):
        if k < spec.n:
            a = np.zeros(spec.n)
            a[k] = 1.0
            rows.append(Constraint(a, Sense.GE, 0.0))
        else:
            a = _draw_row(rng, spec, c, +1.0)
            rows.append(Constraint(a, Sense.GE, -round(float(rng.uniform(*spec.resource_range)), 3)))
    if spec.include_box:
        for i in range(spec.n):
            a = np.zeros(spec.n)
            a[i] = 1.0
            rows.append(Constraint(a, Sense.LE, spec.box_upper))
    return Problem(tuple(c), tuple(rows))


def trial_seed(seed: int, index: int) -> int:
    """Deterministic per-trial seed derived from the ensemble seed."""
    return int(np.random.SeedSequence([seed, index]).generate_state(1, np.uint64)[0])


def _selections(problem: Problem, opts: SolverOptions) -> tuple[int, ...] | None:
    np_ = canonicalize(problem)
    try:
        point, inward = bodmp(np_).point, True
    except NoInwardCrossing:
        point, inward = np.zeros(np_.n), False
    active = select_active_set(np_, point, opts, use_inward=inward)
    return active.selections if isinstance(active, ActiveSet) else None


def rescale_rows(problem: Problem, factors: Sequence[float]) -> Problem:
    rows = tuple(
        Constraint(tuple(lam * v for v in r.a), r.sense, lam * r.b)
        for r, lam in zip(problem.constraints, factors)
    )
    return Problem(problem.c, rows, problem.names, problem.minimize)


@dataclass(frozen=True, eq=False)
class ComparisonRecord:
    problem_id: str
    heuristic: SolveOutcome
    oracle: OracleResult
    z_heuristic: float | None
    z_oracle: float | None
    z_gap: float | None
    rel_gap: float | None
    active_match: bool
    max_violation: float | None
    consistent: bool
    t_heuristic: float
    t_oracle: float
    direction_flip: bool | None = None
    rescale_flip: bool | None = None
    objective_scale_flip: bool | None = None
    boxed: bool = False

    def row(self) -> dict:
        """Flat view used by the CSV and JSON writers."""
        return {
            "problem_id": self.problem_id,
            "heuristic_status": self.heuristic.status,
            "oracle_status": self.oracle.status.value,
            "z_heuristic": self.z_heuristic,
            "z_oracle": self.z_oracle,
            "z_gap": self.z_gap,
            "rel_gap": self.rel_gap,
            "active_match": self.active_match,
            "max_violation": self.max_violation,
            "consistent": self.consistent,
            "direction_flip": self.direction_flip,
            "rescale_flip": self.rescale_flip,
            "objective_scale_flip": self.objective_scale_flip,
            "boxed": self.boxed,
            "t_heuristic": self.t_heuristic,
            "t_oracle": self.t_oracle,
        }


def compare(problem: Problem, opts: SolverOptions = SolverOptions(), problem_id: str = "") -> ComparisonRecord:
    t0 = time.perf_counter()
    h = solve(problem, replace(opts, verify=False))
    t1 = time.perf_counter()
    o = solve_exact(problem, opts.feasibility_tol)
    t2 = time.perf_counter()

    z_h = z_o = gap = rel = viol = None
    match = False
    if isinstance(h, Solved):
        z_h = h.z_star
        viol = check_feasibility(problem, h.x_star, opts.feasibility_tol).max_violation
    if o.status is Status.OPTIMAL:
        z_o = o.z_opt
    if z_h is not None and z_o is not None:
        gap = z_o - z_h
        rel = gap / (1.0 + abs(z_o))
        match = set(h.active.basis_rows) <= set(o.active_rows)
    if o.status is Status.UNBOUNDED:
        consistent = isinstance(h, Unbounded)
    elif o.status is Status.OPTIMAL:
        consistent = isinstance(h, Solved)
    else:
        consistent = False
    return ComparisonRecord(
        problem_id, h, o, z_h, z_o, gap, rel, match, viol, consistent, t1 - t0, t2 - t1
    )


def run_trial(spec: GenSpec, index: int, opts: SolverOptions = SolverOptions()) -> ComparisonRecord:
    seed = trial_seed(spec.seed, index)
    problem = generate_problem(spec.with_seed(seed))
    rec = compare(problem, opts, problem_id=f"{spec.seed}:{index}")

    base = _selections(problem, opts)
    other = (
        CriterionDirection.PRINTED
        if opts.criterion_direction is CriterionDirection.TABLE
        else CriterionDirection.TABLE
    )
    flipped_dir = _selections(problem, replace(opts, criterion_direction=other))
    rng = np.random.default_rng(seed)
    factors = rng.choice([0.1, 10.0], size=problem.m)
    rescaled = _selections(rescale_rows(problem, factors), opts)
    scaled_c = Problem(tuple(3.0 * v for v in problem.c), problem.constraints, problem.names)
    tripled = _selections(scaled_c, opts)
    return replace(
        rec,
        direction_flip=base != flipped_dir,
        rescale_flip=base != rescaled,
        objective_scale_flip=base != tripled,
        boxed=spec.include_box,
    )


def _run_chunk(args) -> list[ComparisonRecord]:
    spec, indices, opts = args
    return [run_trial(spec, i, opts) for i in indices]


def run_ensemble(
    specs: GenSpec | Iterable[GenSpec],
    trials: int,
    opts: SolverOptions = SolverOptions(),
    workers: int = 1,
) -> tuple[list[ComparisonRecord], "Statistics"]:
    """``trials`` instances for each spec; returns records and their summary."""
    if isinstance(specs, GenSpec):
        specs = [specs]
    jobs = [(s, list(range(trials)), opts) for s in specs]
    if workers > 1 and trials > 0:
        chunked = []
        for s, idx, o in jobs:
            step = max(1, math.ceil(len(idx) / workers))
            chunked += [(s, idx[k: k + step], o) for k in range(0, len(idx), step)]
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_run_chunk, chunked))
    else:
        parts = [_run_chunk(j) for j in jobs]
    records = [r for part in parts for r in part]
    return records, summarize(records)


def wilson_interval(k: int, n: int, confidence: float = 0.95) -> tuple[float, float]:
    if n == 0:
        return (0.0, 1.0)
    z = statistics.NormalDist().inv_cdf(0.5 + confidence / 2)
    p = k / n
    denom = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return (max(0.0, centre - half), min(1.0, centre + half))


QUANTILES = (0.0, 0.25, 0.5, 0.75, 0.9, 1.0)


@dataclass(frozen=True)
class Statistics:
    trials: int = 0
    status_counts: dict = field(default_factory=dict)
    compared: int = 0
    match_count: int = 0
    match_fraction: float = 0.0
    match_ci95: tuple[float, float] = (0.0, 1.0)
    small_gap_count: int = 0
    small_gap_fraction: float = 0.0
    rel_gap_quantiles: dict = field(default_factory=dict)
    infeasible_count: int = 0
    infeasible_fraction: float = 0.0
    match_gap_violations: int = 0
    direction_flip_rate: float = 0.0
    rescale_flip_rate: float = 0.0
    objective_scale_flips: int = 0
    boxed_unbounded: int = 0
    consistent_count: int = 0

    def as_dict(self) -> dict:
        return {
            "trials": self.trials,
            "status_counts": dict(sorted(self.status_counts.items())),
            "compared": self.compared,
            "match_count": self.match_count,
            "match_fraction": self.match_fraction,
            "match_ci95": list(self.match_ci95),
            "small_gap_count": self.small_gap_count,
            "small_gap_fraction": self.small_gap_fraction,
            "rel_gap_quantiles": {str(q): v for q, v in self.rel_gap_quantiles.items()},
            "infeasible_count": self.infeasible_count,
            "infeasible_fraction": self.infeasible_fraction,
            "match_gap_violations": self.match_gap_violations,
            "direction_flip_rate": self.direction_flip_rate,
            "rescale_flip_rate": self.rescale_flip_rate,
            "objective_scale_flips": self.objective_scale_flips,
            "boxed_unbounded": self.boxed_unbounded,
            "consistent_count": self.consistent_count,
        }


def _rate(flags: list) -> float:
    flags = [f for f in flags if f is not None]
    return sum(flags) / len(flags) if flags else 0.0


def summarize(records: Sequence[ComparisonRecord], feas_tol: float = 1e-7) -> Statistics:
    """Order-independent summary of a record multiset."""
    if not records:
        return Statistics()
    counts: dict[str, int] = {}
    for r in records:
        key = f"{r.heuristic.status}/{r.oracle.status.value}"
        counts[key] = counts.get(key, 0) + 1
    gaps = sorted(r.rel_gap for r in records if r.rel_gap is not None)
    compared = len(gaps)
    matches = sum(r.active_match for r in records)
    small = sum(abs(g) < GAP_BIN for g in gaps)
    solved = [r for r in records if r.max_violation is not None]
    infeasible = sum(r.max_violation > feas_tol for r in solved)
    bad_match = sum(
        r.active_match and abs(r.rel_gap) >= MATCH_TOL for r in records if r.rel_gap is not None
    )
    quantiles = {}
    if gaps:
        arr = np.array(gaps)
        quantiles = {q: float(np.quantile(arr, q)) for q in QUANTILES}
    return Statistics(
        trials=len(records),
        status_counts=counts,
        compared=compared,
        match_count=matches,
        match_fraction=matches / compared if compared else 0.0,
        match_ci95=wilson_interval(matches, compared),
        small_gap_count=small,
        small_gap_fraction=small / compared if compared else 0.0,
        rel_gap_quantiles=quantiles,
        infeasible_count=infeasible,
        infeasible_fraction=infeasible / len(solved) if solved else 0.0,
        match_gap_violations=bad_match,
        direction_flip_rate=_rate([r.direction_flip for r in records]),
        rescale_flip_rate=_rate([r.rescale_flip for r in records]),
        objective_scale_flips=sum(bool(r.objective_scale_flip) for r in records),
        boxed_unbounded=sum(r.boxed and isinstance(r.heuristic, Unbounded) for r in records),
        consistent_count=sum(r.consistent for r in records),
    )
