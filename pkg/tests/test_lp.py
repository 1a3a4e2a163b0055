import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import linprog

from rcinv.errors import EmptySetError, InputError, UnboundedError
from rcinv.lp import (
    DEFAULT_TOL,
    INFEASIBLE,
    OPTIMAL,
    UNBOUNDED,
    LpProblem,
    ToleranceConfig,
    chebyshev,
    solve_lp,
    support_value,
)
from rcinv.polytope import HPolytope, box, inscribed_radius, point, unit_ball


def test_box_maximum():
    res = solve_lp(LpProblem([1.0], [[1.0], [-1.0]], [3.0, 0.0]))
    assert res.status == OPTIMAL
    assert res.value == pytest.approx(3.0)
    assert res.point == pytest.approx([3.0])


def test_contradictory_bounds_infeasible():
    assert solve_lp(LpProblem([1.0], [[1.0], [-1.0]], [1.0, -2.0])).status == INFEASIBLE


def test_missing_bound_unbounded():
    assert solve_lp(LpProblem([1.0, 1.0], [[1.0, 0.0]], [1.0])).status == UNBOUNDED


def test_dimension_mismatch():
    with pytest.raises(InputError):
        LpProblem([1.0, 2.0], [[1.0]], [1.0])
    with pytest.raises(InputError):
        LpProblem([1.0], [[1.0], [2.0]], [1.0])


@pytest.mark.parametrize("kw", [
    {"tau_feas": 0.0},
    {"tau_rank": 1e-8, "tau_feas": 1e-9},
    {"tau_set": 1e-10},
    {"max_fm_rows": 0},
])
def test_tolerance_validation(kw):
    with pytest.raises(InputError):
        ToleranceConfig(**kw)


def test_support_of_segment():
    W = HPolytope([[1, -1], [-1, 1], [1, 0], [-1, 0]], [0, 0, 1, 1])
    assert support_value(W, [1, 1]) == pytest.approx(2.0)


def test_support_of_square():
    assert support_value(unit_ball(2), [-3, 1]) == pytest.approx(4.0)


def test_support_of_singleton():
    assert support_value(point([0.5, -1.0]), [0, 0]) == pytest.approx(0.0)
    assert support_value(point([0.0, 0.0]), [3, -7]) == pytest.approx(0.0)


def test_support_errors():
    with pytest.raises(EmptySetError):
        support_value(HPolytope([[1.0], [-1.0]], [1.0, -2.0]), [1.0])
    with pytest.raises(UnboundedError):
        support_value(HPolytope([[1.0, 0.0]], [1.0]), [0.0, 1.0])


def test_chebyshev_square():
    c, r = chebyshev(box([0, 0], [2, 2]))
    assert c == pytest.approx([1, 1])
    assert r == pytest.approx(1.0)


def test_chebyshev_empty():
    assert chebyshev(HPolytope([[1.0], [-1.0]], [0.0, -1.0]))[1] == -1.0


def test_chebyshev_planar_constraint_set(planar):
    _, cons = planar
    c, r = chebyshev(cons.X.pieces[0])
    assert r > 0
    assert cons.X.contains(c)


def test_chebyshev_errors():
    with pytest.raises(InputError):
        chebyshev(HPolytope(np.zeros((0, 2)), np.zeros(0)))
    with pytest.raises(UnboundedError):
        chebyshev(HPolytope([[1.0, 0.0]], [1.0]))


bounded_lp = st.integers(0, 2 ** 31 - 1).map(np.random.default_rng)


def _random_lp(rng):
    n = int(rng.integers(1, 5))
    k = int(rng.integers(1, 7))
    M = np.vstack([rng.normal(size=(k, n)), np.eye(n), -np.eye(n)])
    r = np.concatenate([rng.normal(size=k), 5 * np.ones(2 * n)])
    c = rng.normal(size=n)
    return c, M, r


@given(bounded_lp)
def test_agrees_with_scipy(rng):
    c, M, r = _random_lp(rng)
    ours = solve_lp(LpProblem(c, M, r))
    ref = linprog(-c, A_ub=M, b_ub=r, bounds=[(None, None)] * len(c), method="highs")
    if ref.status == 2:
        assert ours.status == INFEASIBLE
    else:
        assert ref.status == 0
        assert ours.status == OPTIMAL
        assert ours.value == pytest.approx(-ref.fun, abs=1e-7)


@given(bounded_lp)
def test_optimal_point_is_feasible_and_attains_value(rng):
    c, M, r = _random_lp(rng)
    res = solve_lp(LpProblem(c, M, r))
    if res.status == OPTIMAL:
        assert np.all(M @ res.point <= r + 1e-9 * max(1.0, np.abs(r).max()))
        assert res.value == pytest.approx(c @ res.point, abs=1e-12)


@given(bounded_lp)
def test_deterministic(rng):
    c, M, r = _random_lp(rng)
    a, b = solve_lp(LpProblem(c, M, r)), solve_lp(LpProblem(c, M, r))
    assert a.status == b.status
    if a.status == OPTIMAL:
        assert np.array_equal(a.point, b.point) and a.value == b.value


@given(bounded_lp)
def test_width_nonnegative(rng):
    n = int(rng.integers(1, 4))
    lo = rng.uniform(-2, 0, n)
    hi = lo + rng.uniform(0, 2, n)
    # rotate a box by a random well-conditioned map to leave the axis-aligned path
    T = np.eye(n) + 0.3 * rng.normal(size=(n, n))
    B = box(lo, hi)
    P = HPolytope(B.H @ np.linalg.inv(T), B.h)
    d = rng.normal(size=n)
    assert support_value(P, d) + support_value(P, -d) >= -1e-9


@given(bounded_lp)
def test_chebyshev_monotone(rng):
    n = int(rng.integers(1, 4))
    lo = rng.uniform(-2, 0, n)
    hi = lo + rng.uniform(0.1, 2, n)
    outer = box(lo - rng.uniform(0, 1, n), hi + rng.uniform(0, 1, n))
    cut = HPolytope(np.vstack([box(lo, hi).H, rng.normal(size=(1, n))]),
                    np.append(box(lo, hi).h, rng.normal()))
    assert inscribed_radius(cut) <= inscribed_radius(outer) + DEFAULT_TOL.tau_set
