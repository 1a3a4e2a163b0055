"""Robust predecessor maps and the outer/inner set iterations."""

import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import InputError, ResourceError, UnboundedError
from .lp import DEFAULT_TOL
from .polytope import HPolytope, bounding_box, minkowski_sum, project_eliminate, unit_ball
from .region import (
    PolyUnion,
    as_union,
    erode_union,
    gap_epsilon,
    inflate,
    intersect_unions,
    is_subset,
    simplify,
)

log = logging.getLogger(__name__)

NONEMPTY = "nonempty"
EMPTY = "empty"
NOT_TERMINATED = "not_terminated"


def _bounded_union(S, name, tol):
    for P in S:
        try:
            lo, hi = bounding_box(P, tol)
        except UnboundedError as e:
            raise InputError(f"{name} must be bounded") from e
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise InputError(f"{name} must be bounded")


def controllability_matrix(A, B):
    n = A.shape[0]
    blocks, M = [], B
    for _ in range(n):
        blocks.append(M)
        M = A @ M
    return np.hstack(blocks)


@dataclass(frozen=True)
class SystemModel:
    """Dynamics ``x+ in A x + B u + W`` with a bounded, nonempty union ``W``."""

    A: np.ndarray
    B: np.ndarray
    W: PolyUnion

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        B = np.asarray(self.B, dtype=float)
        if B.ndim == 1:
            B = B.reshape(-1, 1)
        if A.shape[0] != A.shape[1]:
            raise InputError(f"A must be square, got shape {A.shape}")
        if B.shape[0] != A.shape[0]:
            raise InputError(f"B has {B.shape[0]} rows, A has {A.shape[0]}")
        W = as_union(self.W)
        if W.dim != A.shape[0]:
            raise InputError(f"W has dimension {W.dim}, state dimension is {A.shape[0]}")
        if W.is_empty():
            raise InputError("disturbance set W must be nonempty")
        _bounded_union(W, "W", DEFAULT_TOL)
        if np.linalg.matrix_rank(controllability_matrix(A, B)) < A.shape[0]:
            raise InputError("(A, B) is not controllable")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "W", W)

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def m(self):
        return self.B.shape[1]


@dataclass(frozen=True)
class ConstraintSpec:
    """Compact state and input constraint unions."""

    X: PolyUnion
    U: PolyUnion

    def __post_init__(self):
        X, U = as_union(self.X), as_union(self.U)
        if X.is_empty() or U.is_empty():
            raise InputError("state and input constraint sets must be nonempty")
        _bounded_union(X, "X", DEFAULT_TOL)
        _bounded_union(U, "U", DEFAULT_TOL)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "U", U)

    def check(self, sys):
        if self.X.dim != sys.n:
            raise InputError(f"X has dimension {self.X.dim}, state dimension is {sys.n}")
        if self.U.dim != sys.m:
            raise InputError(f"U has dimension {self.U.dim}, input dimension is {sys.m}")


@dataclass
class IterationTrace:
    mode: str
    iterates: List[PolyUnion]
    window: int
    epsilon: Optional[float] = None
    rho: Optional[float] = None
    stop_index: Optional[int] = None
    verdict: str = NOT_TERMINATED
    last_gap: Optional[float] = None
    stats: List[dict] = field(default_factory=list)

    @property
    def iterations(self):
        return len(self.iterates) - 1

    @property
    def piece_counts(self):
        return [len(R) for R in self.iterates]


@dataclass
class InnerResult:
    R: Optional[PolyUnion]
    rho: float
    stop_index: Optional[int]
    verdict: str
    trace: IterationTrace


def _threads():
    try:
        return max(1, int(os.environ.get("RCINV_THREADS", "1")))
    except ValueError:
        return 1


def _map(fn, items):
    workers = _threads()
    if workers == 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def effective_disturbance(sys, rho, tol=DEFAULT_TOL):
    """Pieces of ``W + rho * [-1, 1]^n``."""
    if rho < 0:
        raise InputError("rho must be nonnegative")
    if rho == 0:
        return sys.W
    ball = unit_ball(sys.n, rho)
    return PolyUnion([minkowski_sum(Wk, ball, tol) for Wk in sys.W], dim=sys.n, tol=tol)


def lift_input_polytope(sys, E, Uj):
    """``{(x, u) : A x + B u in E, u in Uj}``."""
    top = np.hstack([E.H @ sys.A, E.H @ sys.B])
    bottom = np.hstack([np.zeros((Uj.nrows, sys.n)), Uj.H])
    return HPolytope(np.vstack([top, bottom]), np.concatenate([E.h, Uj.h]))


def pre_rho(sys, target, U, rho=0.0, tol=DEFAULT_TOL):
    """``{x : exists u in U, A x + B u + W + rho*B ⊆ target}``."""
    target, U = as_union(target), as_union(U)
    if target.dim != sys.n or U.dim != sys.m:
        raise InputError("target or input set has the wrong dimension")
    if target.is_empty() or U.is_empty():
        return PolyUnion.empty(sys.n)
    E = erode_union(target, effective_disturbance(sys, rho, tol), tol=tol)
    pairs = [(k, Ek, j, Uj) for k, Ek in enumerate(E) for j, Uj in enumerate(U)]

    def project(item):
        k, Ek, j, Uj = item
        try:
            return project_eliminate(lift_input_polytope(sys, Ek, Uj), range(sys.n), tol)
        except ResourceError as e:
            raise ResourceError(f"pre: eroded piece {k} with input piece {j}: {e}") from e

    return simplify(PolyUnion(_map(project, pairs), dim=sys.n, tol=tol), tol)


def _same_union(R, S):
    return len(R) == len(S) and all(P.same_as(Q) for P, Q in zip(R, S))


def _step(sys, cons, R, rho, tol):
    return intersect_unions(pre_rho(sys, R, cons.U, rho, tol), cons.X, tol)


def _record(trace, index, R, t0):
    ms = 1e3 * (time.perf_counter() - t0)
    trace.stats.append({"index": index, "pieces": len(R), "halfspaces": R.n_halfspaces,
                        "wall_ms": ms})
    log.info("%s iteration %d: %d pieces, %d halfspaces, %.1f ms",
             trace.mode, index, len(R), R.n_halfspaces, ms)


def _diameter_bound(S, tol):
    bb = S.bounding_box(tol)
    return 1.0 if bb is None else 2.0 * float(np.max(bb[1] - bb[0])) + 1.0


def iterate_outer(sys, cons, epsilon, window=None, max_iter=500, debug=False, tol=DEFAULT_TOL):
    """Run ``R_{i+1} = pre(R_i) ∩ X`` until ``R_i ⊆ R_{i+L} + eps*B``.

    Parameters
    ----------
    sys : SystemModel
    cons : ConstraintSpec
    epsilon : float
        Stopping parameter, strictly positive.
    window : int, optional
        Look-ahead ``L`` of the stopping rule; defaults to the state dimension.
    max_iter : int
        Maximal number of predecessor steps.
    debug : bool
        Assert nesting ``R_{i+1} ⊆ R_i`` at every step.

    Returns
    -------
    IterationTrace
        ``verdict`` is ``"nonempty"`` with ``stop_index`` the smallest index
        satisfying the rule, ``"empty"`` when an iterate vanished (then the
        maximal invariant set is empty), or ``"not_terminated"`` with the
        current gap in ``last_gap``.
    """
    cons.check(sys)
    if not epsilon > 0:
        raise InputError("epsilon must be positive")
    L = sys.n if window is None else int(window)
    if L < 1:
        raise InputError("window must be at least 1")
    trace = IterationTrace("outer", [cons.X], L, epsilon=float(epsilon))
    _record(trace, 0, cons.X, time.perf_counter())
    fixed = False
    i = 0
    while True:
        while len(trace.iterates) <= i + L:
            k = len(trace.iterates)
            if k > max_iter:
                trace.verdict = NOT_TERMINATED
                j = max(0, k - 1 - L)
                trace.last_gap = gap_epsilon(trace.iterates[j], trace.iterates[j + L],
                                             _diameter_bound(cons.X, tol), 1e-7, tol)
                return trace
            t0 = time.perf_counter()
            prev = trace.iterates[-1]
            R = prev if fixed else _step(sys, cons, prev, 0.0, tol)
            if debug and not is_subset(R, prev, tol):
                raise AssertionError(f"iterate {k} is not nested in iterate {k - 1}")
            trace.iterates.append(R)
            _record(trace, k, R, t0)
            if R.is_empty():
                trace.verdict = EMPTY
                trace.stop_index = k
                return trace
            fixed = fixed or _same_union(R, prev)
        if is_subset(trace.iterates[i], inflate(trace.iterates[i + L], epsilon, tol), tol):
            trace.stop_index = i
            trace.verdict = NONEMPTY
            log.info("outer stopping rule holds at index %d", i)
            return trace
        i += 1


def iterate_inner(sys, cons, rho, max_iter=500, debug=False, tol=DEFAULT_TOL):
    """Run ``R_{i+1} = pre_rho(R_i) ∩ X`` until ``R_i ⊆ R_{i+1} + rho*B``.

    The certified invariant set is ``iterates[stop_index + 1]``.
    """
    cons.check(sys)
    if not rho > 0:
        raise InputError("rho must be positive")
    trace = IterationTrace("inner", [cons.X], 1, rho=float(rho))
    _record(trace, 0, cons.X, time.perf_counter())
    i = 0
    while True:
        if i >= max_iter:
            trace.verdict = NOT_TERMINATED
            R, S = trace.iterates[-2], trace.iterates[-1]
            if not S.is_empty():
                trace.last_gap = gap_epsilon(R, S, _diameter_bound(cons.X, tol), 1e-7, tol)
            return trace
        t0 = time.perf_counter()
        prev = trace.iterates[-1]
        R = _step(sys, cons, prev, rho, tol)
        if debug and not is_subset(R, prev, tol):
            raise AssertionError(f"iterate {i + 1} is not nested in iterate {i}")
        trace.iterates.append(R)
        _record(trace, i + 1, R, t0)
        if is_subset(prev, inflate(R, rho, tol), tol):
            trace.stop_index = i
            trace.verdict = EMPTY if R.is_empty() else NONEMPTY
            log.info("inner stopping rule holds at index %d", i)
            return trace
        i += 1


def inner_approximation(sys, cons, rho, max_iter=500, tol=DEFAULT_TOL):
    trace = iterate_inner(sys, cons, rho, max_iter, tol=tol)
    R = None if trace.verdict == NOT_TERMINATED else trace.iterates[trace.stop_index + 1]
    return InnerResult(R, float(rho), trace.stop_index, trace.verdict, trace)


@dataclass(frozen=True)
class RciVerdict:
    passed: bool
    residual: float

    def __bool__(self):
        return self.passed


def check_rci(sys, R, U_eff, rho=0.0, tol=DEFAULT_TOL):
    """One-step certificate ``R ⊆ pre_rho(R)`` with inputs from ``U_eff``.

    The union of per-piece predecessors is tried first; it is contained in
    the predecessor of the whole union, so passing it is conclusive. The
    exact predecessor is computed only when that cheaper test fails.
    ``residual`` is the inflation needed to cover ``R`` by its predecessor.
    """
    R, U_eff = as_union(R), as_union(U_eff)
    if R.is_empty():
        return RciVerdict(True, 0.0)
    per_piece = PolyUnion([P for Rk in R for P in pre_rho(sys, Rk, U_eff, rho, tol)],
                          dim=sys.n, tol=tol)
    if is_subset(R, per_piece, tol):
        return RciVerdict(True, 0.0)
    pre = per_piece if len(R) == 1 else pre_rho(sys, R, U_eff, rho, tol)
    if len(R) > 1 and is_subset(R, pre, tol):
        return RciVerdict(True, 0.0)
    if pre.is_empty():
        return RciVerdict(False, float("inf"))
    bound = _diameter_bound(PolyUnion(R.pieces + pre.pieces, dim=sys.n), tol)
    return RciVerdict(False, gap_epsilon(R, pre, bound, 1e-7, tol))
