import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from conftest import PRINTED_BODMP
from geolp.geometry import (
    NOT_CROSSING,
    CriterionDirection,
    NoInwardCrossing,
    ZeroVectorError,
    angle,
    bodd,
    bodd_via_first_coordinate,
    bodmp,
    choose_limiter,
    cos_angle,
    euclid_plane_distance,
    inward_candidates,
    limiter_distance,
    outward_candidates,
    unit_normal,
)
from geolp.harness import GenSpec, generate_problem
from geolp.model import Problem, canonicalize
from geolp.oracle import check_feasibility

PRINTED = CriterionDirection.PRINTED


@pytest.mark.parametrize(
    "v, expected, tol",
    [
        ((0.5, 1.0, 2.0), (0.218, 0.436, 0.873), 1e-3),
        ((1, 0, 0), (1, 0, 0), 0),
        ((3, 1, 2), (0.802, 0.267, 0.535), 1e-3),
    ],
)
def test_unit_normal(v, expected, tol):
    u = unit_normal(v)
    np.testing.assert_allclose(u, expected, atol=tol)
    assert abs(np.linalg.norm(u) - 1) < 1e-12


def test_unit_normal_zero():
    with pytest.raises(ZeroVectorError):
        unit_normal((0, 0))


def test_cos_angle():
    v_o = unit_normal((0.5, 1, 2))
    assert cos_angle(v_o, v_o) == 1.0
    assert cos_angle((1, 0), (0, 1)) == 0.0
    v2 = unit_normal((1.7, 2.8, 2.1))
    assert abs(cos_angle(v2, v_o) - 0.880) < 2e-3
    assert abs(angle(v2, v_o) - 0.494) < 2e-3


def test_cos_angle_clamps():
    u = np.array([1.0 + 1e-15, 0.0])
    assert cos_angle(u, u) == 1.0
    assert angle(u, u) == 0.0


def test_bodd_values():
    v_o = unit_normal((0.5, 1, 2))
    assert abs(bodd((3, 1, 2), 5.5, v_o) - 1.939) < 1e-3
    assert abs(bodd((1.1, 2.3, -1), 5.3, v_o) - 14.287) < 1e-3
    assert abs(bodd((2.1, 3, 1.1), 5.8, v_o) - 2.126) < 1e-3


def test_bodd_zero_first_coefficient():
    # ray along x2; the first-coordinate form cannot express it
    assert bodd((0, 1), 2, unit_normal((0, 1))) == 2
    with pytest.raises(ZeroDivisionError):
        bodd_via_first_coordinate((0, 1), 2, (0, 1))


def test_bodd_not_crossing():
    v_o = unit_normal((1, 1))
    assert bodd((1, -1), 1, v_o) == NOT_CROSSING
    assert bodd((1, 1), -1, v_o) == NOT_CROSSING
    assert bodd((-1, 0), 1, v_o) == NOT_CROSSING


@settings(max_examples=1000, deadline=None)
@given(
    st.lists(st.floats(-10, 10), min_size=3, max_size=3),
    st.lists(st.floats(-10, 10), min_size=3, max_size=3),
    st.floats(0.1, 10),
)
def test_bodd_matches_first_coordinate_form(c, a, b):
    assume(abs(c[0]) > 1e-3 and np.linalg.norm(c) > 1e-3)
    v_o = unit_normal(c)
    rate = float(np.dot(a, v_o))
    assume(abs(rate) > 1e-6 * max(1.0, np.linalg.norm(a)))
    literal = bodd_via_first_coordinate(a, b, c)
    # the first-coordinate form runs the line in the sign(c1) direction
    signed = b / rate
    expected = literal if c[0] > 0 else -literal
    assert abs(signed - expected) <= 1e-9 * max(1.0, abs(signed))
    d = bodd(a, b, v_o)
    if signed > 0:
        assert d == pytest.approx(signed, rel=1e-12)
    else:
        assert d == NOT_CROSSING


def test_bodmp_worked_example(worked_np):
    hit = bodmp(worked_np)
    assert hit.g == 1
    assert abs(hit.d_g - 1.459) < 1e-3
    np.testing.assert_allclose(hit.point, (0.318, 0.637, 1.274), atol=2e-3)


def test_bodmp_worked_example_recomputed_by_first_coordinate(worked_np):
    # independent route for every inward row
    c = worked_np.base.c
    for j in worked_np.inward:
        assert bodd(worked_np.A[j], worked_np.b[j], worked_np.v_o) == pytest.approx(
            bodd_via_first_coordinate(worked_np.A[j], worked_np.b[j], c), rel=1e-12
        )


def test_bodmp_single_row():
    hit = bodmp(canonicalize(Problem((1,), [((1,), "<=", 1)])))
    assert hit.g == 0
    np.testing.assert_allclose(hit.point, [1.0])


def test_bodmp_tie_takes_lowest_index():
    p = Problem((1, 1), [((1, 1), "<=", 2), ((2, 2), "<=", 4)])
    assert bodmp(canonicalize(p)).g == 0


def test_bodmp_none():
    with pytest.raises(NoInwardCrossing):
        bodmp(canonicalize(Problem((1,), [((1,), ">=", 0)])))


def test_limiter_distance_reference_values(worked_np):
    e3 = limiter_distance(worked_np.A[2], worked_np.normals[2], PRINTED_BODMP)
    e6 = limiter_distance(worked_np.A[5], worked_np.normals[5], PRINTED_BODMP)
    assert abs(e3 - 0.564) < 5e-3
    assert abs(e6 - 0.669) < 1e-3


def test_limiter_distance_zero_when_point_is_normal():
    v = unit_normal((1, 2, 2))
    assert limiter_distance((1, 2, 2), v, v) == 0.0


def test_limiter_distance_disagrees_with_most_reference_entries(worked_np):
    # literal values for R_1 and R_4 are far from 1.781 and 0.859
    e1 = limiter_distance(worked_np.A[0], worked_np.normals[0], PRINTED_BODMP)
    e4 = limiter_distance(worked_np.A[3], worked_np.normals[3], PRINTED_BODMP)
    assert abs(e1 - 0.212) < 5e-3
    assert abs(e1 - 1.781) > 1
    assert abs(e4 - 0.859) > 1


def test_euclid_plane_distance():
    assert euclid_plane_distance((1, 0), 1, (0, 0)) == 1
    assert euclid_plane_distance((3, 1, 2), 5.5, PRINTED_BODMP) == pytest.approx(0.319, abs=2e-3)
    assert euclid_plane_distance((1, 1), 2, (1, 1)) == 0


def test_inward_candidates_worked_example(worked_np):
    assert inward_candidates(0, worked_np) == (0, 1, 2, 3, 4)
    assert inward_candidates(1, worked_np) == (0, 1, 3, 4)
    assert inward_candidates(2, worked_np) == ()


def test_inward_candidates_literal_direction(worked_np):
    assert inward_candidates(0, worked_np, direction=PRINTED) == ()
    assert inward_candidates(2, worked_np, direction=PRINTED) == (0, 1, 2, 3, 4)


def test_outward_candidates_worked_example(worked_np):
    assert outward_candidates(2, worked_np) == (5, 6)
    assert 5 not in outward_candidates(0, worked_np)
    assert outward_candidates(2, worked_np, direction=PRINTED) == (7,)


def test_outward_lower_bound_never_limits_growth():
    np_ = canonicalize(Problem((1,), [((1,), ">=", 0)]))
    assert outward_candidates(0, np_) == ()


def test_candidates_dimension_range(worked_np):
    with pytest.raises(IndexError):
        inward_candidates(3, worked_np)


def test_choose_limiter_prefers_inward(worked_np):
    point = bodmp(worked_np).point
    ch = choose_limiter(0, worked_np, point)
    assert ch.cls.value == "inward"
    assert ch.row in ch.candidates
    assert ch.e == min(limiter_distance(worked_np.A[j], worked_np.normals[j], point) for j in ch.candidates)
    assert choose_limiter(2, worked_np, point).row == 6


@st.composite
def generated(draw):
    seed = draw(st.integers(0, 2**32 - 1))
    n = draw(st.integers(2, 3))
    return generate_problem(GenSpec(seed=seed, n=n, m_inward=draw(st.integers(1, 5)), m_outward=n))


@settings(max_examples=100, deadline=None)
@given(generated())
def test_bodmp_is_minimal(problem):
    np_ = canonicalize(problem)
    hit = bodmp(np_)
    for j in np_.inward:
        assert hit.d_g <= bodd(np_.A[j], np_.b[j], np_.v_o)
    np.testing.assert_allclose(hit.point, hit.d_g * np_.v_o)


def _ray_reach(problem, direction, hi=1e4):
    # largest feasible t along t*direction, by bisection on the feasibility test
    lo = 0.0
    for _ in range(200):
        mid = (lo + hi) / 2
        if check_feasibility(problem, mid * direction, tol=0).feasible:
            lo = mid
        else:
            hi = mid
    return lo


@settings(max_examples=60, deadline=None)
@given(generated())
def test_bodmp_row_is_never_redundant_along_the_ray(problem):
    np_ = canonicalize(problem)
    hit = bodmp(np_)
    others = sorted(bodd(np_.A[j], np_.b[j], np_.v_o) for j in np_.inward if j != hit.g)
    assume(not others or others[0] > hit.d_g * (1 + 1e-6))
    rows = [r for j, r in enumerate(problem.constraints) if j != hit.g]
    reduced = Problem(problem.c, rows)
    with_row = _ray_reach(problem, np_.v_o)
    without = _ray_reach(reduced, np_.v_o)
    assert with_row == pytest.approx(hit.d_g, rel=1e-9)
    assert without > with_row * (1 + 1e-7)


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.floats(-5, 5), min_size=4, max_size=4),
    st.lists(st.floats(-5, 5), min_size=4, max_size=4),
    st.permutations(range(4)),
)
def test_limiter_distance_permutation_invariant(a, p, perm):
    assume(np.linalg.norm(a) > 1e-3)
    v = unit_normal(a)
    a, p = np.array(a), np.array(p)
    perm = list(perm)
    assert limiter_distance(a[perm], v[perm], p[perm]) == pytest.approx(
        limiter_distance(a, v, p), rel=1e-9, abs=1e-9
    )


@settings(max_examples=100, deadline=None)
@given(generated(), st.floats(0.01, 100))
def test_row_scaling_invariants(problem, lam):
    np_ = canonicalize(problem)
    scaled = Problem(
        problem.c, [(tuple(lam * v for v in r.a), r.sense, lam * r.b) for r in problem.constraints]
    )
    sp = canonicalize(scaled)
    assert sp.classes == np_.classes
    x = np.ones(problem.n)
    for j in range(np_.m):
        assert bodd(sp.A[j], sp.b[j], sp.v_o) == pytest.approx(bodd(np_.A[j], np_.b[j], np_.v_o), rel=1e-9)
        assert euclid_plane_distance(sp.A[j], sp.b[j], x) == pytest.approx(
            euclid_plane_distance(np_.A[j], np_.b[j], x), rel=1e-9, abs=1e-12
        )
    for i in range(problem.n):
        assert inward_candidates(i, sp) == inward_candidates(i, np_)
        assert outward_candidates(i, sp) == outward_candidates(i, np_)
        inw = set(inward_candidates(i, np_))
        assert not inw & set(np_.outward)
        assert not set(outward_candidates(i, np_)) & set(np_.inward)
