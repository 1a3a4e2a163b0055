"""Dense two-phase simplex and the scalar LP queries built on it.

Every geometric routine in the package reduces to small dense linear
programs of the form ``maximize c'y  s.t.  M y <= r`` with free ``y``.
The solver below is a plain tableau simplex (Dantzig pricing with Bland's
rule on ties, falling back to pure Bland after a run of degenerate pivots),
which keeps results bit-for-bit deterministic for identical inputs.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import EmptySetError, InputError, NumericError, UnboundedError

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical slacks used throughout the package.

    Attributes
    ----------
    tau_feas : float
        Feasibility slack of the LP solver.
    tau_set : float
        Slack for set inclusion, emptiness of interiors and redundancy.
    tau_rank : float
        Smallest admissible pivot element.
    max_fm_rows : int
        Cap on rows produced by a single Fourier-Motzkin elimination.
    max_pieces : int
        Cap on the number of pieces of a union.
    """

    tau_feas: float = 1e-9
    tau_set: float = 1e-7
    tau_rank: float = 1e-10
    max_fm_rows: int = 100000
    max_pieces: int = 20000

    def __post_init__(self):
        if min(self.tau_feas, self.tau_set, self.tau_rank) <= 0:
            raise InputError("tolerances must be strictly positive")
        if self.max_fm_rows <= 0 or self.max_pieces <= 0:
            raise InputError("size caps must be strictly positive")
        if not self.tau_rank <= self.tau_feas <= self.tau_set:
            raise InputError("tolerances must satisfy tau_rank <= tau_feas <= tau_set")


DEFAULT_TOL = ToleranceConfig()


@dataclass(frozen=True)
class LpProblem:
    """maximize ``objective @ y`` subject to ``constraint_matrix @ y <= rhs``."""

    objective: np.ndarray
    constraint_matrix: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=float).reshape(-1)
        r = np.asarray(self.rhs, dtype=float).reshape(-1)
        M = np.asarray(self.constraint_matrix, dtype=float)
        if M.ndim == 1 and M.size == 0:
            M = M.reshape(0, c.size)
        if M.ndim != 2:
            raise InputError("constraint matrix must be two-dimensional")
        if M.shape[0] != r.size:
            raise InputError(
                f"constraint matrix has {M.shape[0]} rows but rhs has {r.size} entries")
        if M.shape[1] != c.size:
            raise InputError(
                f"constraint matrix has {M.shape[1]} columns but objective has {c.size} entries")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(M)) and np.all(np.isfinite(r))):
            raise InputError("LP data must be finite")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "constraint_matrix", M)
        object.__setattr__(self, "rhs", r)


@dataclass(frozen=True)
class LpResult:
    status: str
    point: Optional[np.ndarray] = field(default=None)
    value: Optional[float] = field(default=None)

    @property
    def optimal(self):
        return self.status == OPTIMAL


def _pivot(T, p, q):
    T[p] /= T[p, q]
    col = T[:, q].copy()
    col[p] = 0.0
    T -= np.outer(col, T[p])


def _simplex(T, basis, ncols, opt_tol, piv_tol, max_iter):
    # objective row holds z_j - c_j; columns with a negative entry improve a max
    degenerate = 0
    bland = False
    for _ in range(max_iter):
        d = T[-1, :ncols]
        if bland:
            cand = np.flatnonzero(d < -opt_tol)
            if cand.size == 0:
                return OPTIMAL
            q = int(cand[0])
        else:
            q = int(np.argmin(d))
            if d[q] >= -opt_tol:
                return OPTIMAL
        col = T[:-1, q]
        rows = np.flatnonzero(col > piv_tol)
        if rows.size == 0:
            if np.any(col > 1e3 * np.finfo(float).eps):
                raise NumericError("no pivot above tau_rank in an improving column")
            return UNBOUNDED
        ratios = np.maximum(T[rows, -1], 0.0) / col[rows]
        rmin = ratios.min()
        ties = rows[ratios <= rmin + 1e-12 * max(1.0, abs(rmin))]
        p = int(ties[np.argmin(basis[ties])])
        if rmin <= piv_tol:
            degenerate += 1
            if degenerate > 50:
                bland = True
        else:
            degenerate = 0
        _pivot(T, p, q)
        basis[p] = q
    raise NumericError("simplex iteration limit reached")


def solve_lp(problem: LpProblem, tol: ToleranceConfig = DEFAULT_TOL) -> LpResult:
    """Solve ``problem`` with a two-phase tableau simplex.

    The free variables are split as ``y = y+ - y-``; rows with a negative
    right-hand side receive an artificial variable for phase one.
    """
    c, M, r = problem.objective, problem.constraint_matrix, problem.rhs
    k, n = M.shape
    if k == 0:
        if np.any(c != 0.0):
            return LpResult(UNBOUNDED)
        return LpResult(OPTIMAL, np.zeros(n), 0.0)

    scale_b = max(1.0, float(np.abs(r).max()))
    feas_tol = tol.tau_feas * scale_b
    piv_tol = tol.tau_rank
    max_iter = 50 * (k + 2 * n) + 1000

    flip = r < 0.0
    sign = np.where(flip, -1.0, 1.0)
    n_struct = 2 * n + k
    art_rows = np.flatnonzero(flip)
    n_art = art_rows.size

    T = np.zeros((k + 1, n_struct + n_art + 1))
    T[:k, :n] = M * sign[:, None]
    T[:k, n:2 * n] = -T[:k, :n]
    T[:k, 2 * n:2 * n + k] = np.diag(sign)
    T[art_rows, n_struct + np.arange(n_art)] = 1.0
    T[:k, -1] = r * sign

    basis = 2 * n + np.arange(k)
    basis[art_rows] = n_struct + np.arange(n_art)

    if n_art:
        T[-1, :n_struct] = -T[art_rows, :n_struct].sum(axis=0)
        T[-1, -1] = -T[art_rows, -1].sum()
        _simplex(T, basis, n_struct, piv_tol, piv_tol, max_iter)
        if T[-1, -1] < -feas_tol:
            return LpResult(INFEASIBLE)
        keep = np.ones(k + 1, dtype=bool)
        for i in range(k):
            if basis[i] >= n_struct:
                row = np.abs(T[i, :n_struct])
                j = int(np.argmax(row))
                if row[j] > piv_tol:
                    _pivot(T, i, j)
                    basis[i] = j
                else:
                    keep[i] = False
        T = np.delete(T, np.s_[n_struct:n_struct + n_art], axis=1)[keep]
        basis = basis[keep[:-1]]
        A_std = np.hstack([M, -M, np.eye(k)])[keep[:-1]] * sign[keep[:-1], None]
        b_std = (r * sign)[keep[:-1]]
    else:
        A_std = np.hstack([M, -M, np.eye(k)])
        b_std = r.copy()

    c_std = np.concatenate([c, -c, np.zeros(k)])
    cB = c_std[basis]
    T[-1, :n_struct] = cB @ T[:-1, :n_struct] - c_std
    T[-1, -1] = cB @ T[:-1, -1]
    opt_tol = tol.tau_rank * (1.0 + float(np.abs(c).max(initial=0.0)))
    status = _simplex(T, basis, n_struct, opt_tol, piv_tol, max_iter)
    if status == UNBOUNDED:
        return LpResult(UNBOUNDED)

    x = np.zeros(n_struct)
    x[basis] = T[:-1, -1]
    # re-solve the final basis against the original data to shed tableau drift
    try:
        xb = np.linalg.solve(A_std[:, basis], b_std)
        if np.all(np.isfinite(xb)):
            x_ref = np.zeros(n_struct)
            x_ref[basis] = xb
            if np.max(A_std @ x_ref - b_std, initial=0.0) <= feas_tol:
                x = x_ref
    except np.linalg.LinAlgError:
        pass
    y = x[:n] - x[n:2 * n]
    viol = float(np.max(M @ y - r, initial=0.0))
    if viol > tol.tau_set * scale_b:
        raise NumericError(f"simplex returned a point violating constraints by {viol:.3g}")
    return LpResult(OPTIMAL, y, float(c @ y))


def _rows(P):
    return np.asarray(P.H, dtype=float), np.asarray(P.h, dtype=float)


def support_point(P, d, tol: ToleranceConfig = DEFAULT_TOL):
    """Return ``(value, maximizer)`` of ``d'x`` over the polytope ``P``."""
    H, h = _rows(P)
    d = np.asarray(d, dtype=float).reshape(-1)
    if d.size != H.shape[1]:
        raise InputError("direction and polytope dimensions differ")
    res = solve_lp(LpProblem(d, H, h), tol)
    if res.status == INFEASIBLE:
        raise EmptySetError("support of an empty set")
    if res.status == UNBOUNDED:
        raise UnboundedError(f"set is unbounded in direction {d.tolist()}")
    return res.value, res.point


def support_value(P, d, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """sup { d'x : x in P }."""
    return support_point(P, d, tol)[0]


def chebyshev(P, tol: ToleranceConfig = DEFAULT_TOL):
    """Center and radius of a largest inscribed infinity-norm ball.

    Returns ``(None, -1.0)`` for an empty set. A radius below ``tau_set``
    means the set has empty interior.
    """
    H, h = _rows(P)
    k, n = H.shape
    if k == 0:
        raise InputError("chebyshev ball needs at least one constraint")
    if n == 1:
        return _chebyshev_1d(H[:, 0], h, tol)
    weights = np.abs(H).sum(axis=1)
    Mx = np.zeros((k + 1, n + 1))
    Mx[:k, :n] = H
    Mx[:k, n] = weights
    Mx[k, n] = -1.0
    obj = np.zeros(n + 1)
    obj[n] = 1.0
    res = solve_lp(LpProblem(obj, Mx, np.append(h, 0.0)), tol)
    if res.status == INFEASIBLE:
        return None, -1.0
    if res.status == UNBOUNDED:
        raise UnboundedError("set contains arbitrarily large balls")
    return res.point[:n], float(res.point[n])


def _chebyshev_1d(a, h, tol):
    pos, neg = a > tol.tau_rank, a < -tol.tau_rank
    zero = ~(pos | neg)
    if np.any(h[zero] < -tol.tau_feas):
        return None, -1.0
    if not pos.any() or not neg.any():
        raise UnboundedError("interval is unbounded")
    hi = float(np.min(h[pos] / a[pos]))
    lo = float(np.max(h[neg] / a[neg]))
    if lo > hi + tol.tau_feas * max(1.0, abs(lo), abs(hi)):
        return None, -1.0
    return np.array([0.5 * (lo + hi)]), max(0.0, 0.5 * (hi - lo))
