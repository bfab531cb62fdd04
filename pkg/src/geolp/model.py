"""LP containers, validation, and the inward/outward normal form.

A :class:`Problem` is a maximization ``max c.x`` subject to a list of
inequality rows.  :func:`canonicalize` splits the rows into *inward*
constraints (stored as ``a.x <= b``, normal leaning with the objective) and
*outward* constraints (stored as ``a.x >= b``), and caches the unit normals
and the angles they make with the objective direction.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


class Sense(enum.Enum):
    LE = "<="
    GE = ">="


class ConstraintClass(enum.Enum):
    INWARD = "inward"
    OUTWARD = "outward"


@dataclass(frozen=True)
class Constraint:
    a: tuple[float, ...]
    sense: Sense
    b: float

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        object.__setattr__(self, "b", float(self.b))
        if not isinstance(self.sense, Sense):
            object.__setattr__(self, "sense", Sense(self.sense))


@dataclass(frozen=True)
class Problem:
    """Maximize ``c.x`` subject to ``constraints``.

    ``minimize`` records that the objective was given as a minimization and
    ``c`` has already been negated; reported objective values flip sign back.
    ``names`` defaults to ``R_1 .. R_m`` in input order.
    """

    c: tuple[float, ...]
    constraints: tuple[Constraint, ...]
    names: tuple[str, ...] | None = None
    minimize: bool = False

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(float(v) for v in self.c))
        rows = tuple(
            r if isinstance(r, Constraint) else Constraint(*r) for r in self.constraints
        )
        object.__setattr__(self, "constraints", rows)
        if self.names is None:
            names = tuple(f"R_{j + 1}" for j in range(len(rows)))
        else:
            names = tuple(str(s) for s in self.names)
        object.__setattr__(self, "names", names)

    @classmethod
    def from_arrays(cls, c, A, senses, b, names=None, minimize=False) -> "Problem":
        """Build from a coefficient matrix; ``senses`` items may be ``Sense``,
        ``"<="``/``">="`` strings."""
        rows = tuple(
            Constraint(tuple(row), s if isinstance(s, Sense) else Sense(s), bj)
            for row, s, bj in zip(np.asarray(A, dtype=float).tolist(), senses, b)
        )
        return cls(tuple(c), rows, names, minimize)

    @property
    def n(self) -> int:
        return len(self.c)

    @property
    def m(self) -> int:
        return len(self.constraints)

    @property
    def A(self) -> np.ndarray:
        return np.array([r.a for r in self.constraints], dtype=float).reshape(self.m, -1)

    @property
    def b(self) -> np.ndarray:
        return np.array([r.b for r in self.constraints], dtype=float)

    def as_le(self) -> tuple[np.ndarray, np.ndarray]:
        """All rows rewritten in ``<=`` orientation (GE rows negated)."""
        sign = np.array([1.0 if r.sense is Sense.LE else -1.0 for r in self.constraints])
        return self.A * sign[:, None], self.b * sign

    def label(self, j: int) -> str:
        return self.names[j]


class ValidationError(ValueError):
    """Raised by :func:`validate`; ``issues`` lists every violation found."""

    def __init__(self, issues: Sequence["Issue"]):
        self.issues = tuple(issues)
        super().__init__("; ".join(str(i) for i in self.issues))

    @property
    def kinds(self) -> set[str]:
        return {i.kind for i in self.issues}


@dataclass(frozen=True)
class Issue:
    kind: str  # ZeroObjective | DimensionMismatch | NonFiniteEntry | ZeroRow | EmptyProblem | BadName
    message: str

    def __str__(self):
        return f"{self.kind}: {self.message}"


def find_issues(problem: Problem) -> list[Issue]:
    issues = []
    n = problem.n
    if n < 1:
        issues.append(Issue("EmptyProblem", "objective has no coefficients"))
    if problem.m < 1:
        issues.append(Issue("EmptyProblem", "problem has no constraints"))
    if not all(math.isfinite(v) for v in problem.c):
        issues.append(Issue("NonFiniteEntry", "objective has a non-finite coefficient"))
    elif n >= 1 and not any(problem.c):
        issues.append(Issue("ZeroObjective", "objective coefficients are all zero"))
    if len(problem.names) != problem.m:
        issues.append(
            Issue("BadName", f"{len(problem.names)} names for {problem.m} constraints")
        )
    for j, row in enumerate(problem.constraints):
        label = problem.names[j] if j < len(problem.names) else f"row {j + 1}"
        if len(row.a) != n:
            issues.append(
                Issue("DimensionMismatch", f"{label} has {len(row.a)} coefficients, expected {n}")
            )
        finite = all(math.isfinite(v) for v in row.a) and math.isfinite(row.b)
        if not finite:
            issues.append(Issue("NonFiniteEntry", f"{label} has a non-finite entry"))
        elif not any(row.a):
            issues.append(Issue("ZeroRow", f"{label} has no nonzero coefficient"))
    return issues


def validate(problem: Problem) -> None:
    """Raise :class:`ValidationError` listing every broken invariant."""
    issues = find_issues(problem)
    if issues:
        raise ValidationError(issues)


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class NormalizedProblem:
    """A validated problem in inward (``<=``) / outward (``>=``) layout.

    Row order is that of ``base``; ``classes[j]`` tells which block row ``j``
    belongs to and ``A[j], b[j]`` are stored in that block's orientation.
    """

    base: Problem
    classes: tuple[ConstraintClass, ...]
    A: np.ndarray
    b: np.ndarray
    v_o: np.ndarray
    normals: np.ndarray
    cos_angles: np.ndarray
    angles: np.ndarray
    inward: tuple[int, ...] = field(init=False)
    outward: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self, "inward", tuple(j for j, k in enumerate(self.classes) if k is ConstraintClass.INWARD)
        )
        object.__setattr__(
            self, "outward", tuple(j for j, k in enumerate(self.classes) if k is ConstraintClass.OUTWARD)
        )

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def m(self) -> int:
        return self.base.m

    def le_row(self, j: int) -> tuple[np.ndarray, float]:
        """Row ``j`` in ``<=`` orientation."""
        if self.classes[j] is ConstraintClass.INWARD:
            return self.A[j], float(self.b[j])
        return -self.A[j], -float(self.b[j])

    def stored_sense(self, j: int) -> Sense:
        return Sense.LE if self.classes[j] is ConstraintClass.INWARD else Sense.GE

    def stored_problem(self) -> Problem:
        """The stored rows as a plain :class:`Problem` (same feasible set)."""
        return Problem.from_arrays(
            self.base.c, self.A, [self.stored_sense(j) for j in range(self.m)], self.b,
            names=self.base.names, minimize=self.base.minimize,
        )


def canonicalize(problem: Problem) -> NormalizedProblem:
    """Classify and orient every row, and compute unit normals and angles.

    A row whose ``<=`` form has ``a.c > 0`` is inward and kept as ``<=``; any
    other row (including ``a.c == 0``) is outward and stored as ``>=``.
    """
    validate(problem)
    from .geometry import unit_normal, cos_angle

    c = np.asarray(problem.c, dtype=float)
    A_le, b_le = problem.as_le()
    growth = A_le @ c
    classes = tuple(ConstraintClass.INWARD if g > 0 else ConstraintClass.OUTWARD for g in growth)
    flip = np.array([1.0 if k is ConstraintClass.INWARD else -1.0 for k in classes])
    A = A_le * flip[:, None]
    b = b_le * flip
    v_o = unit_normal(c)
    normals = np.array([unit_normal(row) for row in A]).reshape(A.shape)
    cosines = np.array([cos_angle(v, v_o) for v in normals])
    return NormalizedProblem(
        base=problem,
        classes=classes,
        A=_frozen(A),
        b=_frozen(b),
        v_o=_frozen(v_o),
        normals=_frozen(normals),
        cos_angles=_frozen(cosines),
        angles=_frozen(np.arccos(cosines)),
    )
