"""Vector geometry behind the heuristic.

Distances along the objective ray, the first inward boundary that ray meets
(the BODMP), the limiter distance used to rank competing constraints, and
the per-dimension candidacy tests.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import ConstraintClass, NormalizedProblem

#: Returned by :func:`bodd` when the objective ray never crosses the boundary.
NOT_CROSSING = math.inf

DEFAULT_EPSILON = 1e-9


class ZeroVectorError(ValueError):
    pass


class NoInwardCrossing(Exception):
    """No inward boundary lies ahead of the origin along the objective ray."""


class CriterionDirection(enum.Enum):
    """Which inequality direction the per-dimension candidacy tests use.

    ``TABLE`` keeps an inward row for dimension ``i`` when its normal
    component is at least the objective's; ``PRINTED`` is the opposite
    literal reading.
    """

    PRINTED = "printed"
    TABLE = "table"


def unit_normal(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    norm = math.sqrt(float(v @ v))
    if norm == 0.0:
        raise ZeroVectorError("cannot normalize a zero vector")
    return v / norm


def cos_angle(u, w) -> float:
    """Cosine of the angle between two unit vectors, clamped to [-1, 1]."""
    return min(1.0, max(-1.0, float(np.dot(u, w))))


def angle(u, w) -> float:
    return math.acos(cos_angle(u, w))


def bodd(a, b: float, v_o) -> float:
    """Distance from the origin to ``a.x = b`` measured along ``v_o``.

    ``a.x <= b`` orientation.  Returns :data:`NOT_CROSSING` when the ray is
    parallel to the boundary or meets it at a non-positive parameter.
    """
    rate = float(np.dot(a, v_o))
    if rate <= 0.0:
        return NOT_CROSSING
    d = b / rate
    return d if d > 0.0 else NOT_CROSSING


def bodd_via_first_coordinate(a, b: float, c) -> float:
    """The same distance parameterized by ``x1`` (needs ``c[0] != 0``).

    Walks the objective line as ``x_i = (c_i / c_1) x_1``, solves for the
    crossing ``x_1 = b / G`` with ``G = sum_i a_i c_i / c_1`` and scales by
    the line's length per unit ``x_1``.  No sign filtering; kept as an
    independent cross-check of :func:`bodd`.
    """
    c = np.asarray(c, dtype=float)
    if c[0] == 0.0:
        raise ZeroDivisionError("first objective coefficient is zero")
    ratios = c / c[0]
    G = float(np.dot(a, ratios))
    return b / G * math.sqrt(float(ratios @ ratios))


@dataclass(frozen=True)
class BodmpResult:
    g: int
    d_g: float
    point: np.ndarray


def bodmp(np_: NormalizedProblem) -> BodmpResult:
    """First inward boundary hit by the objective ray from the origin.

    Ties go to the lowest row index.  Raises :class:`NoInwardCrossing` when
    no inward row has a finite distance.
    """
    best_j, best_d = -1, NOT_CROSSING
    for j in np_.inward:
        d = bodd(np_.A[j], float(np_.b[j]), np_.v_o)
        if d < best_d:
            best_j, best_d = j, d
    if best_j < 0:
        raise NoInwardCrossing("objective ray crosses no inward boundary")
    return BodmpResult(best_j, best_d, best_d * np_.v_o)


def limiter_distance(a, v, point) -> float:
    """``|sum_i a_i (v_i - p_i)|`` for raw row coefficients ``a``, the row's
    unit normal ``v`` and a reference point ``p``.

    Not a Euclidean distance and not invariant to row scaling; see
    :func:`euclid_plane_distance` for the geometric one.
    """
    a = np.asarray(a, dtype=float)
    return abs(float(a @ (np.asarray(v, dtype=float) - np.asarray(point, dtype=float))))


def euclid_plane_distance(a, b: float, point) -> float:
    a = np.asarray(a, dtype=float)
    return abs(float(a @ np.asarray(point, dtype=float)) - b) / math.sqrt(float(a @ a))


def _check_dim(i: int, n: int) -> None:
    if not 0 <= i < n:
        raise IndexError(f"dimension {i} out of range for n={n}")


def inward_candidates(
    i: int,
    np_: NormalizedProblem,
    epsilon: float = DEFAULT_EPSILON,
    direction: CriterionDirection = CriterionDirection.TABLE,
) -> tuple[int, ...]:
    """Inward rows that may limit growth along dimension ``i`` (0-based)."""
    _check_dim(i, np_.n)
    vo = np_.v_o[i]
    if direction is CriterionDirection.TABLE:
        keep = lambda vj: vj >= vo - epsilon
    else:
        keep = lambda vj: vo >= vj - epsilon
    return tuple(j for j in np_.inward if keep(np_.normals[j, i]))


def outward_candidates(
    i: int,
    np_: NormalizedProblem,
    epsilon: float = DEFAULT_EPSILON,
    direction: CriterionDirection = CriterionDirection.TABLE,
) -> tuple[int, ...]:
    """Outward rows (``>=`` orientation) that may limit dimension ``i``.

    ``TABLE`` requires the objective component to exceed the row's by at
    least ``epsilon``, so a lower bound aligned with the objective (``x1 >= 0``
    under ``max x1``) never qualifies.
    """
    _check_dim(i, np_.n)
    vo = np_.v_o[i]
    if direction is CriterionDirection.TABLE:
        keep = lambda vj: vo >= vj + epsilon
    else:
        keep = lambda vj: vo <= vj + epsilon
    return tuple(j for j in np_.outward if keep(np_.normals[j, i]))


@dataclass(frozen=True)
class LimiterChoice:
    """The constraint chosen to stop growth along one dimension.

    ``ranked`` holds ``(e, row)`` for every candidate, ascending; ``row`` is
    the first of them unless the choice was ``repaired`` to avoid reusing a
    row already picked for an earlier dimension.
    """

    dim: int
    row: int
    cls: ConstraintClass
    e: float
    candidates: tuple[int, ...]
    ranked: tuple[tuple[float, int], ...]
    repaired: bool = False


def rank_candidates(np_: NormalizedProblem, candidates: Sequence[int], point) -> tuple[tuple[float, int], ...]:
    """Candidates sorted by limiter distance, ties to the lowest row index."""
    scored = [
        (limiter_distance(np_.A[j], np_.normals[j], point), j) for j in candidates
    ]
    return tuple(sorted(scored))


def choose_limiter(
    i: int,
    np_: NormalizedProblem,
    point,
    epsilon: float = DEFAULT_EPSILON,
    direction: CriterionDirection = CriterionDirection.TABLE,
    inward: bool = True,
) -> LimiterChoice | None:
    """Pick dimension ``i``'s limiter: inward candidates first, else outward.

    ``inward=False`` skips the inward block.  ``None`` means the dimension is
    not limited by any row.
    """
    if inward:
        cands = inward_candidates(i, np_, epsilon, direction)
        if cands:
            ranked = rank_candidates(np_, cands, point)
            return LimiterChoice(i, ranked[0][1], ConstraintClass.INWARD, ranked[0][0], cands, ranked)
    cands = outward_candidates(i, np_, epsilon, direction)
    if cands:
        ranked = rank_candidates(np_, cands, point)
        return LimiterChoice(i, ranked[0][1], ConstraintClass.OUTWARD, ranked[0][0], cands, ranked)
    return None
