import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import PRINTED_X
from geolp.fixtures import read
from geolp.harness import GenSpec, generate_problem
from geolp.model import Problem
from geolp.oracle import (
    BudgetExceeded,
    NotPointed,
    Status,
    check_feasibility,
    enumerate_vertices,
    simplex_solve,
    solve_exact,
)

TRIANGLE = Problem((1, 2), [((1, 0), ">=", 0), ((0, 1), ">=", 0), ((1, 1), "<=", 1)])
CUBE = Problem(
    (1, 1, 1),
    [((1, 0, 0), "<=", 1), ((0, 1, 0), "<=", 1), ((0, 0, 1), "<=", 1),
     ((1, 0, 0), ">=", 0), ((0, 1, 0), ">=", 0), ((0, 0, 1), ">=", 0)],
)


@pytest.mark.parametrize("solver", [enumerate_vertices, simplex_solve])
def test_triangle(solver):
    r = solver(TRIANGLE)
    assert r.status is Status.OPTIMAL
    np.testing.assert_allclose(r.x_opt, [0, 1], atol=1e-12)
    assert r.z_opt == pytest.approx(2)


@pytest.mark.parametrize("solver", [enumerate_vertices, simplex_solve])
def test_cube(solver):
    r = solver(CUBE)
    np.testing.assert_allclose(r.x_opt, [1, 1, 1], atol=1e-12)
    assert r.z_opt == pytest.approx(3)
    assert r.active_rows == (0, 1, 2)


def test_worked_example_oracles_agree_with_frozen_fixture(worked):
    frozen = json.loads(read("worked_example_oracle.json"))
    for solver in (enumerate_vertices, simplex_solve):
        r = solver(worked)
        assert r.status.value == frozen["status"]
        assert r.z_opt == pytest.approx(frozen["z"], rel=1e-8)
        np.testing.assert_allclose(r.x_opt, frozen["x"], atol=1e-9)
        assert [j + 1 for j in r.active_rows] == frozen["active_rows"]
    assert check_feasibility(worked, frozen["x"]).feasible


def test_infeasible_pair():
    p = Problem((1,), [((1,), "<=", 0), ((1,), ">=", 1)])
    assert simplex_solve(p).status is Status.INFEASIBLE
    assert enumerate_vertices(p).status is Status.INFEASIBLE


def test_unbounded_ray():
    p = Problem((1,), [((1,), ">=", 0)])
    assert simplex_solve(p).status is Status.UNBOUNDED
    assert enumerate_vertices(p).status is Status.UNBOUNDED


def test_unbounded_along_face_direction():
    # recession direction (1, 0) is not a corner of the unit box
    p = Problem((1, 0), [((1, 0), ">=", 0), ((0, 1), ">=", 0), ((0, 1), "<=", 1)])
    assert enumerate_vertices(p).status is Status.UNBOUNDED
    assert simplex_solve(p).status is Status.UNBOUNDED


def test_not_pointed_falls_back_to_simplex():
    p = Problem((1, 1), [((1, 0), "<=", 1)])
    with pytest.raises(NotPointed):
        enumerate_vertices(p)
    assert solve_exact(p).status is Status.UNBOUNDED


def test_budget_guard():
    with pytest.raises(BudgetExceeded):
        enumerate_vertices(CUBE, cap=10)


def test_feasibility_audit_of_printed_answer(worked):
    rep = check_feasibility(worked, PRINTED_X)
    assert len(rep.violations) == 1
    row, mag = rep.violations[0]
    assert row == 1
    assert mag == pytest.approx(0.200, abs=1e-3)
    assert rep.max_violation == mag


def test_feasibility_origin(worked):
    assert check_feasibility(worked, (0, 0, 0)).feasible


def test_feasibility_empty():
    assert check_feasibility(Problem((1,), []), (5,)).feasible


@st.composite
def random_lp(draw):
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    m = int(rng.integers(n, 10))
    A = np.round(rng.uniform(-3, 3, (m, n)), 2)
    A[np.all(A == 0, axis=1), 0] = 1.0
    b = np.round(rng.uniform(-2, 5, m), 2)
    c = np.round(rng.uniform(-2, 2, n), 2)
    if not np.any(c):
        c[0] = 1.0
    senses = rng.choice(["<=", ">="], m)
    return Problem.from_arrays(c, A, senses, b)


@settings(max_examples=300, deadline=None)
@given(random_lp())
def test_oracles_agree_with_each_other_and_scipy(problem):
    from scipy.optimize import linprog

    A, b = problem.as_le()
    ref = linprog(-np.array(problem.c), A_ub=A, b_ub=b, bounds=[(None, None)] * problem.n)
    expected = {0: Status.OPTIMAL, 2: Status.INFEASIBLE, 3: Status.UNBOUNDED}[ref.status]
    s = simplex_solve(problem)
    assert s.status is expected
    try:
        e = enumerate_vertices(problem)
    except NotPointed:
        e = None
    if e is not None:
        assert e.status is expected
    if expected is Status.OPTIMAL:
        z = -ref.fun
        assert abs(s.z_opt - z) < 1e-6 * (1 + abs(z))
        assert check_feasibility(problem, s.x_opt).feasible
        if e is not None:
            assert abs(e.z_opt - s.z_opt) < 1e-8 * (1 + abs(s.z_opt))
            assert check_feasibility(problem, e.x_opt).feasible


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 4))
def test_enumeration_optimum_is_a_binding_vertex(seed, n):
    p = generate_problem(GenSpec(seed=seed, n=n, m_inward=4, m_outward=n))
    r = enumerate_vertices(p)
    assert r.status is Status.OPTIMAL
    A, b = p.as_le()
    act = list(r.active_rows)
    assert len(act) >= n
    assert np.linalg.matrix_rank(A[act]) == n
    np.testing.assert_allclose(A[act] @ r.x_opt, b[act], atol=1e-7)
    assert r.z_opt == pytest.approx(float(np.dot(p.c, r.x_opt)))
