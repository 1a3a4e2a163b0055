"""Null-controllable sets with bounded effort and the outer-set assembly."""

import itertools
import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .errors import CertificateError, HorizonTooShortError, InputError
from .invariance import EMPTY, NONEMPTY, NOT_TERMINATED, IterationTrace, _map, iterate_outer
from .lp import DEFAULT_TOL, INFEASIBLE, LpProblem, solve_lp
from .polytope import HPolytope, intersect, minkowski_sum, point, project_eliminate, unit_ball
from .region import PolyUnion, inflate, is_subset, simplify

log = logging.getLogger(__name__)

MAX_CUBE_DIM = 20


@dataclass
class NullLadder:
    """Sets ``N_0 = {0} ⊆ N_1 ⊆ ... ⊆ N_L`` with states and inputs in ``delta*B``."""

    delta: float
    sets: List[HPolytope]
    horizon: int
    c: float
    certified: bool = False


@dataclass
class OuterResult:
    R: Optional[PolyUnion]
    epsilon: float
    delta: Optional[float]
    c: Optional[float]
    stop_index: Optional[int]
    window: int
    verdict: str
    trace: IterationTrace
    contained: Optional[bool] = None


def _vertex_lp(A, B, z, L):
    """LP data for the cheapest ``L``-step transfer of ``z`` to the origin.

    Variables are ``(c, u_0, ..., u_{L-1})``; the objective maximizes ``-c``.
    """
    n, m = B.shape
    nv = 1 + m * L
    powers = [np.linalg.matrix_power(A, i) for i in range(L + 1)]

    def state_map(i):
        # x_i = A^i z + sum_{k<i} A^{i-k-1} B u_k
        S = np.zeros((n, nv))
        for k in range(i):
            S[:, 1 + m * k:1 + m * (k + 1)] = powers[i - k - 1] @ B
        return S, powers[i] @ z

    rows, rhs = [], []
    S, s0 = state_map(L)
    rows += [S, -S]
    rhs += [-s0, s0]
    for k in range(L):
        U = np.zeros((m, nv))
        U[:, 1 + m * k:1 + m * (k + 1)] = np.eye(m)
        U[:, 0] = -1.0
        Un = -U
        Un[:, 0] = -1.0
        rows += [U, Un]
        rhs += [np.zeros(m), np.zeros(m)]
    for i in range(1, L):
        S, s0 = state_map(i)
        Sp, Sn = S.copy(), -S
        Sp[:, 0] = -1.0
        Sn[:, 0] = -1.0
        rows += [Sp, Sn]
        rhs += [-s0, s0]
    obj = np.zeros(nv)
    obj[0] = -1.0
    return LpProblem(obj, np.vstack(rows), np.concatenate(rhs))


def constant_c(sys, L, tol=DEFAULT_TOL):
    """Effort constant ``c >= 1`` such that ``eps*B ⊆ N_L^{c*eps}``.

    One LP per vertex of the unit cube bounds the input and intermediate
    state magnitudes needed to reach the origin in ``L`` steps; the maximum
    over vertices is floored at 1.
    """
    n = sys.n
    L = int(L)
    if L < 1:
        raise InputError("horizon must be at least 1")
    if n > MAX_CUBE_DIM:
        raise InputError(f"cube vertex enumeration is limited to n <= {MAX_CUBE_DIM}, got {n}")
    verts = [np.array(v, dtype=float) for v in itertools.product((-1.0, 1.0), repeat=n)]

    def solve(z):
        res = solve_lp(_vertex_lp(sys.A, sys.B, z, L), tol)
        if res.status == INFEASIBLE:
            raise HorizonTooShortError(
                f"cube vertex {z.tolist()} cannot be steered to the origin in {L} steps; "
                "increase the window")
        return -res.value

    values = _map(solve, verts)
    c = max(1.0, max(values))
    log.info("effort constant for horizon %d: LP maximum %.6g, c = %.6g", L, max(values), c)
    return float(c)


def null_ladder(sys, delta, L, c, tol=DEFAULT_TOL):
    """``N_0 = {0}``, ``N_{i+1} = {x : exists u in delta*B, A x + B u in N_i} ∩ delta*B``.

    Raises ``CertificateError`` unless ``(delta/c)*B ⊆ N_L``.
    """
    if not delta > 0:
        raise InputError("delta must be positive")
    n, m = sys.n, sys.m
    ux = unit_ball(n, delta)
    uu = unit_ball(m, delta)
    sets = [point(np.zeros(n))]
    for _ in range(int(L)):
        prev = sets[-1]
        top = np.hstack([prev.H @ sys.A, prev.H @ sys.B])
        bottom = np.hstack([np.zeros((uu.nrows, n)), uu.H])
        lifted = HPolytope(np.vstack([top, bottom]), np.concatenate([prev.h, uu.h]))
        sets.append(intersect(project_eliminate(lifted, range(n), tol), ux, tol))
    ladder = NullLadder(float(delta), sets, int(L), float(c))
    if not is_subset(PolyUnion([unit_ball(n, delta / c)]), PolyUnion([sets[-1]]), tol):
        raise CertificateError(
            f"(delta/c)-ball is not inside N_{L}: c = {c:g} is too small or the horizon too short")
    ladder.certified = True
    return ladder


def assemble_outer(trace, ladder, tol=DEFAULT_TOL):
    """Union of ``R_{i*+j} + N_j`` for ``j = 1..L`` with containment certificate."""
    if trace.mode != "outer":
        raise InputError("assembly needs an outer iteration trace")
    if trace.verdict == EMPTY:
        return OuterResult(PolyUnion.empty(trace.iterates[0].dim), trace.epsilon, ladder.delta,
                           ladder.c, trace.stop_index, trace.window, EMPTY, trace, True)
    if trace.verdict != NONEMPTY:
        raise InputError("iteration did not terminate; nothing to assemble")
    if ladder.horizon != trace.window:
        raise InputError(f"ladder horizon {ladder.horizon} differs from window {trace.window}")
    if abs(ladder.delta - ladder.c * trace.epsilon) > 1e-12 * max(1.0, ladder.delta):
        raise InputError("ladder delta must equal c * epsilon")
    i = trace.stop_index
    n = trace.iterates[0].dim
    pieces = [minkowski_sum(P, ladder.sets[j], tol)
              for j in range(1, trace.window + 1) for P in trace.iterates[i + j]]
    R = simplify(PolyUnion(pieces, dim=n, tol=tol), tol)
    contained = is_subset(R, inflate(trace.iterates[0], ladder.delta, tol), tol)
    return OuterResult(R, trace.epsilon, ladder.delta, ladder.c, i, trace.window,
                       EMPTY if R.is_empty() else NONEMPTY, trace, contained)


def outer_approximation(sys, cons, epsilon, window=None, max_iter=500, tol=DEFAULT_TOL):
    """Outer invariant approximation with constraint relaxation ``delta = c*epsilon``."""
    L = sys.n if window is None else int(window)
    c = constant_c(sys, L, tol)
    ladder = null_ladder(sys, c * epsilon, L, c, tol)
    trace = iterate_outer(sys, cons, epsilon, L, max_iter, tol=tol)
    if trace.verdict == NOT_TERMINATED:
        return OuterResult(None, float(epsilon), ladder.delta, c, None, L, NOT_TERMINATED, trace)
    return assemble_outer(trace, ladder, tol)


def rho_for_epsilon(sys, epsilon, L, tol=DEFAULT_TOL):
    """Margin ``rho = epsilon / (L * c)`` for the inner iteration."""
    if not epsilon > 0:
        raise InputError("epsilon must be positive")
    return float(epsilon) / (int(L) * constant_c(sys, L, tol))
