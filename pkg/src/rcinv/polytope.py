"""Convex polytopes in halfspace representation ``{x : H x <= h}``.

Canonical form: unit-norm rows, no redundant rows, rows sorted
lexicographically (ties broken by offset). The empty set has a single
distinguished canonical record, ``HPolytope.empty(n)``.
"""

from collections import namedtuple

import numpy as np

from .errors import DegenerateError, EmptySetError, InputError, ResourceError
from .lp import DEFAULT_TOL, INFEASIBLE, OPTIMAL, LpProblem, chebyshev, solve_lp, support_point

# rows whose coordinates agree to this many decimals are treated as parallel
_KEY_DECIMALS = 10
_ZERO_COEF = 1e-12


class HPolytope:
    """Immutable H-representation polytope.

    Parameters
    ----------
    H : array_like, shape (k, n)
        Constraint normals.
    h : array_like, shape (k,)
        Offsets.
    """

    __slots__ = ("H", "h", "dim", "_empty", "_canonical", "_bbox", "_radius")

    def __init__(self, H, h, *, _canonical=False, _empty=None):
        H = np.array(H, dtype=float)
        h = np.array(h, dtype=float).reshape(-1)
        if H.ndim == 1:
            H = H.reshape(1, -1) if h.size == 1 else H.reshape(h.size, -1)
        if H.ndim != 2 or H.shape[0] != h.size:
            raise InputError(f"H has shape {H.shape} but h has {h.size} entries")
        if H.shape[1] == 0:
            raise InputError("polytope dimension must be at least 1")
        if not (np.all(np.isfinite(H)) and np.all(np.isfinite(h))):
            raise InputError("polytope data must be finite")
        H.setflags(write=False)
        h.setflags(write=False)
        self.H = H
        self.h = h
        self.dim = H.shape[1]
        self._empty = _empty
        self._canonical = _canonical
        self._bbox = None
        self._radius = None

    @classmethod
    def empty(cls, n):
        return cls(np.zeros((1, n)), [-1.0], _canonical=True, _empty=True)

    @property
    def nrows(self):
        return self.H.shape[0]

    @property
    def is_canonical(self):
        return self._canonical

    def is_empty(self, tol=DEFAULT_TOL):
        if self._empty is None:
            if self.nrows == 0:
                self._empty = False
            else:
                res = solve_lp(LpProblem(np.zeros(self.dim), self.H, self.h), tol)
                self._empty = res.status == INFEASIBLE
        return self._empty

    def contains(self, x, tol=DEFAULT_TOL):
        x = np.asarray(x, dtype=float).reshape(-1)
        if self._empty:
            return False
        return bool(np.all(self.H @ x <= self.h + tol.tau_set))

    def translate(self, v):
        v = np.asarray(v, dtype=float).reshape(-1)
        if self._empty:
            return self
        return HPolytope(self.H, self.h + self.H @ v)

    def scale(self, alpha):
        if alpha <= 0:
            raise InputError("scale factor must be positive")
        if self._empty:
            return self
        return HPolytope(self.H, alpha * self.h)

    def same_as(self, other, atol=1e-9):
        """Row-wise comparison of two canonical representations."""
        if self.dim != other.dim:
            return False
        if bool(self._empty) or bool(other._empty):
            return bool(self._empty) == bool(other._empty)
        return (self.H.shape == other.H.shape
                and np.allclose(self.H, other.H, atol=atol, rtol=0)
                and np.allclose(self.h, other.h, atol=atol, rtol=1e-12))

    def sort_key(self):
        return (self.nrows, tuple(np.round(self.H, _KEY_DECIMALS).ravel()),
                tuple(np.round(self.h, _KEY_DECIMALS)))

    def __repr__(self):
        if self._empty:
            return f"HPolytope.empty({self.dim})"
        return f"HPolytope(H={self.H.tolist()}, h={self.h.tolist()})"


def box(lo, hi):
    """Axis-aligned box ``[lo, hi]``."""
    lo = np.asarray(lo, dtype=float).reshape(-1)
    hi = np.asarray(hi, dtype=float).reshape(-1)
    if lo.shape != hi.shape:
        raise InputError("box bounds must have equal length")
    n = lo.size
    return HPolytope(np.vstack([np.eye(n), -np.eye(n)]), np.concatenate([hi, -lo]))


def unit_ball(n, radius=1.0):
    """Infinity-norm ball ``radius * [-1, 1]^n``."""
    return box(-radius * np.ones(n), radius * np.ones(n))


def point(x):
    x = np.asarray(x, dtype=float).reshape(-1)
    return box(x, x)


def box_bounds(P):
    """Return ``(lo, hi)`` if every row of ``P`` is a signed unit vector, else None."""
    H = P.H
    if P._empty or H.shape[0] == 0:
        return None
    nz = np.abs(H) > _ZERO_COEF
    if not np.all(nz.sum(axis=1) == 1):
        return None
    n = P.dim
    col = np.argmax(nz, axis=1)
    coef = H[np.arange(H.shape[0]), col]
    bound = P.h / coef
    hi = np.full(n, np.inf)
    lo = np.full(n, -np.inf)
    up = coef > 0
    np.minimum.at(hi, col[up], bound[up])
    np.maximum.at(lo, col[~up], bound[~up])
    if not (np.all(np.isfinite(hi)) and np.all(np.isfinite(lo))):
        return None
    return lo, hi


def support_values(P, D, tol=DEFAULT_TOL):
    """Support of ``P`` along every row of ``D``."""
    D = np.atleast_2d(np.asarray(D, dtype=float))
    bb = box_bounds(P)
    if bb is not None:
        lo, hi = bb
        if np.any(lo > hi + tol.tau_feas):
            raise EmptySetError("support of an empty set")
        return np.where(D > 0, D * hi, D * lo).sum(axis=1)
    return np.array([support_point(P, d, tol)[0] for d in D])


def _lex_order(H, h):
    keys = [np.round(h, _KEY_DECIMALS)]
    keys += [np.round(H[:, j], _KEY_DECIMALS) for j in range(H.shape[1] - 1, -1, -1)]
    return np.lexsort(keys)


def _clean(a):
    a = np.where(np.abs(a) < 1e-15, 0.0, a)
    return a + 0.0


def canonicalize(P, tol=DEFAULT_TOL):
    """Set-equal canonical representation of ``P``."""
    if P._canonical:
        return P
    n = P.dim
    if P._empty:
        return HPolytope.empty(n)
    H, h = P.H, P.h
    norms = np.linalg.norm(H, axis=1)
    zero = norms <= tol.tau_rank
    if np.any(h[zero] < -tol.tau_feas):
        return HPolytope.empty(n)
    # rows already of unit norm are left alone so reloading is bit-stable
    norms = np.where(np.abs(norms - 1.0) <= 4 * np.finfo(float).eps, 1.0, norms)
    H = _clean(H[~zero] / norms[~zero, None])
    h = _clean(h[~zero] / norms[~zero])
    if H.shape[0] == 0:
        return HPolytope(np.zeros((0, n)), np.zeros(0), _canonical=True, _empty=False)

    order = _lex_order(H, h)
    H, h = H[order], h[order]
    keyed = np.round(H, _KEY_DECIMALS)
    first = np.ones(H.shape[0], dtype=bool)
    first[1:] = np.any(keyed[1:] != keyed[:-1], axis=1)
    H, h = H[first], h[first]

    if solve_lp(LpProblem(np.zeros(n), H, h), tol).status == INFEASIBLE:
        return HPolytope.empty(n)

    k = H.shape[0]
    active = np.ones(k, dtype=bool)
    for i in range(k):
        active[i] = False
        M = np.vstack([H[active], H[i]])
        r = np.append(h[active], h[i] + 1.0)
        res = solve_lp(LpProblem(H[i], M, r), tol)
        if res.status != OPTIMAL or res.value > h[i] + tol.tau_set:
            active[i] = True
    return HPolytope(H[active], h[active], _canonical=True, _empty=False)


def _resorted(H, h):
    # reorder an already irredundant, normalized representation
    order = _lex_order(H, h)
    return HPolytope(H[order], h[order], _canonical=True, _empty=False)


def _check_dims(P, Q):
    if P.dim != Q.dim:
        raise InputError(f"dimension mismatch: {P.dim} vs {Q.dim}")


def intersect(P, Q, tol=DEFAULT_TOL):
    _check_dims(P, Q)
    if P._empty or Q._empty:
        return HPolytope.empty(P.dim)
    return canonicalize(HPolytope(np.vstack([P.H, Q.H]), np.concatenate([P.h, Q.h])), tol)


AffineHull = namedtuple("AffineHull", "point basis eq_rows full")


def affine_hull(P, tol=DEFAULT_TOL):
    """Affine hull of a nonempty canonical polytope.

    Returns an ``AffineHull`` with a relative-interior point, an orthonormal
    basis (n x k) of the hull's direction space and the mask of rows that
    hold with equality on all of ``P``.
    """
    P = canonicalize(P, tol)
    if P._empty:
        raise EmptySetError("affine hull of an empty set")
    n = P.dim
    if P.nrows == 0:
        return AffineHull(np.zeros(n), np.eye(n), np.zeros(0, dtype=bool), True)
    c, r = chebyshev(P, tol)
    if r >= tol.tau_set:
        return AffineHull(c, np.eye(n), np.zeros(P.nrows, dtype=bool), True)
    eq = np.zeros(P.nrows, dtype=bool)
    for i in range(P.nrows):
        low = -support_point(P, -P.H[i], tol)[0]
        eq[i] = low >= P.h[i] - tol.tau_set
    if not eq.any():
        return AffineHull(c, np.eye(n), eq, True)
    _, s, vt = np.linalg.svd(P.H[eq])
    rank = int(np.sum(s > 1e-9))
    basis = vt[rank:].T
    weights = np.linalg.norm(P.H @ basis, axis=1) if basis.shape[1] else np.zeros(P.nrows)
    weights[eq] = 0.0
    center, _ = relative_chebyshev(P.H, P.h, weights, tol)
    if center is None:
        center = c
    return AffineHull(center, basis, eq, False)


def relative_chebyshev(H, h, weights, tol=DEFAULT_TOL, cap=1.0):
    """Largest ``r`` in ``[0, cap]`` with ``H x + weights * r <= h``.

    With ``weights`` the row norms restricted to an affine subspace this is
    the inscribed radius relative to that subspace. Returns ``(None, -1)``
    when infeasible.
    """
    k, n = H.shape
    M = np.zeros((k + 2, n + 1))
    M[:k, :n] = H
    M[:k, n] = weights
    M[k, n] = 1.0
    M[k + 1, n] = -1.0
    obj = np.zeros(n + 1)
    obj[n] = 1.0
    res = solve_lp(LpProblem(obj, M, np.concatenate([h, [cap, 0.0]])), tol)
    if res.status != OPTIMAL:
        return None, -1.0
    return res.point[:n], float(res.point[n])


def relative_center(P, tol=DEFAULT_TOL):
    """A deterministic point of ``P`` that is central even if ``P`` is flat.

    Full-dimensional sets return their Chebyshev center. Flat sets return the
    center of their bounding box when it lies in ``P`` (the midpoint for a
    segment), otherwise the relative Chebyshev center.
    """
    P = canonicalize(P, tol)
    if P._empty:
        raise EmptySetError("center of an empty set")
    c, r = chebyshev(P, tol)
    if r >= tol.tau_set:
        return c
    lo, hi = bounding_box(P, tol)
    mid = 0.5 * (lo + hi)
    if P.contains(mid, tol):
        return mid
    return affine_hull(P, tol).point


def bounding_box(P, tol=DEFAULT_TOL):
    """``(lo, hi)`` of the smallest enclosing box; cached on the instance."""
    if P._bbox is None:
        bb = box_bounds(P)
        if bb is None:
            eye = np.eye(P.dim)
            bb = (-support_values(P, -eye, tol), support_values(P, eye, tol))
        P._bbox = bb
    return P._bbox


def inscribed_radius(P, tol=DEFAULT_TOL):
    """Chebyshev radius of ``P`` (``-1`` when empty); cached on the instance."""
    if P._radius is None:
        if P._empty:
            P._radius = -1.0
        elif P.nrows == 0:
            P._radius = np.inf
        else:
            P._radius = chebyshev(P, tol)[1]
    return P._radius


def convex_subset(P, Q, tol=DEFAULT_TOL):
    """True iff ``P ⊆ Q`` (both convex) up to ``tau_set``."""
    _check_dims(P, Q)
    if P.is_empty(tol):
        return True
    if Q.is_empty(tol):
        return False
    if Q.nrows == 0:
        return True
    try:
        s = support_values(P, Q.H, tol)
    except Exception:
        return False
    return bool(np.all(s <= Q.h + tol.tau_set))


def _fm_step(H, h, j, tol):
    a = H[:, j]
    pos = a > _ZERO_COEF
    neg = a < -_ZERO_COEF
    zero = ~(pos | neg)
    Hp = H[pos] / a[pos, None]
    hp = h[pos] / a[pos]
    Hn = H[neg] / -a[neg, None]
    hn = h[neg] / -a[neg]
    comb = (Hp[:, None, :] + Hn[None, :, :]).reshape(-1, H.shape[1])
    combh = (hp[:, None] + hn[None, :]).reshape(-1)
    newH = np.delete(np.vstack([H[zero], comb]), j, axis=1)
    newh = np.concatenate([h[zero], combh])
    return newH, newh


def project_eliminate(P, keep, tol=DEFAULT_TOL):
    """Orthogonal projection of ``P`` onto the coordinates ``keep``.

    Variables are removed one at a time by Fourier-Motzkin elimination,
    always picking the variable with the fewest generated rows, and the
    intermediate polytope is canonicalized after every step.
    """
    keep = [int(i) for i in keep]
    if not keep or len(set(keep)) != len(keep) or min(keep) < 0 or max(keep) >= P.dim:
        raise InputError(f"invalid coordinate selection {keep} for dimension {P.dim}")
    P = canonicalize(P, tol)
    if P._empty:
        return HPolytope.empty(len(keep))
    cols = list(range(P.dim))
    H, h = P.H, P.h
    step = 0
    while len(cols) > len(keep):
        cand = [c for c in range(len(cols)) if cols[c] not in keep]
        best, best_cost = None, None
        for c in cand:
            npos = int(np.sum(H[:, c] > _ZERO_COEF))
            nneg = int(np.sum(H[:, c] < -_ZERO_COEF))
            cost = npos * nneg
            if best is None or cost < best_cost:
                best, best_cost = c, cost
        a = H[:, best]
        npos = int(np.sum(a > _ZERO_COEF))
        nneg = int(np.sum(a < -_ZERO_COEF))
        total = npos * nneg + (H.shape[0] - npos - nneg)
        step += 1
        if total > tol.max_fm_rows:
            raise ResourceError(
                f"Fourier-Motzkin step {step} (eliminating coordinate {cols[best]}) "
                f"would create {total} rows, cap is {tol.max_fm_rows}")
        H, h = _fm_step(H, h, best, tol)
        del cols[best]
        Q = canonicalize(HPolytope(H, h), tol)
        if Q._empty:
            return HPolytope.empty(len(keep))
        H, h = Q.H, Q.h
    perm = [cols.index(i) for i in keep]
    if perm == sorted(perm):
        return HPolytope(H, h, _canonical=True, _empty=False)
    return _resorted(H[:, perm], h)


def _parametrize(Q, tol):
    """Write ``Q = a + V T`` with ``T`` full-dimensional in its own space."""
    hull = affine_hull(Q, tol)
    if hull.full:
        return np.zeros(Q.dim), np.eye(Q.dim), canonicalize(Q, tol)
    Qc = canonicalize(Q, tol)
    a, V = hull.point, hull.basis
    if V.shape[1] == 0:
        return a, V, None
    HT = Qc.H[~hull.eq_rows] @ V
    hT = Qc.h[~hull.eq_rows] - Qc.H[~hull.eq_rows] @ a
    return a, V, HPolytope(HT, hT)


def minkowski_sum(P, Q, tol=DEFAULT_TOL):
    """``{p + q : p in P, q in Q}`` by projecting a lifted polytope.

    The operand with the lower-dimensional affine hull is parametrized over
    its hull, so sums with segments or flat sets eliminate only as many
    variables as the flat set has dimensions.
    """
    _check_dims(P, Q)
    n = P.dim
    if P.is_empty(tol) or Q.is_empty(tol):
        return HPolytope.empty(n)
    hp, hq = affine_hull(P, tol), affine_hull(Q, tol)
    dp, dq = hp.basis.shape[1], hq.basis.shape[1]
    if dp < dq or (dp == dq and canonicalize(P, tol).nrows < canonicalize(Q, tol).nrows):
        P, Q = Q, P
    P = canonicalize(P, tol)
    a, V, T = _parametrize(Q, tol)
    base = P.translate(a)
    if T is None:
        return canonicalize(base, tol)
    top = np.hstack([base.H, -base.H @ V])
    bottom = np.hstack([np.zeros((T.nrows, n)), T.H])
    lifted = HPolytope(np.vstack([top, bottom]), np.concatenate([base.h, T.h]))
    return project_eliminate(lifted, list(range(n)), tol)


def erode_convex(P, Q, tol=DEFAULT_TOL):
    """Pontryagin difference ``{x : x + Q ⊆ P}`` for convex ``P``."""
    _check_dims(P, Q)
    if Q.is_empty(tol):
        raise InputError("erosion by an empty set is not defined")
    P = canonicalize(P, tol)
    if P._empty or P.nrows == 0:
        return P
    s = support_values(Q, P.H, tol)
    return canonicalize(HPolytope(P.H, P.h - s), tol)


def vertices_2d(P, tol=DEFAULT_TOL):
    """Counterclockwise vertex cycle of a full-dimensional planar polytope,
    starting at the lowest (then leftmost) vertex."""
    if P.dim != 2:
        raise DegenerateError("vertex extraction is only available in two dimensions")
    P = canonicalize(P, tol)
    if P._empty:
        raise DegenerateError("empty polytope has no vertices")
    _, r = chebyshev(P, tol)
    if r < tol.tau_set:
        raise DegenerateError("polytope has empty interior")
    H, h = P.H, P.h
    i, j = np.triu_indices(H.shape[0], k=1)
    a1, b1, a2, b2 = H[i, 0], H[i, 1], H[j, 0], H[j, 1]
    det = a1 * b2 - a2 * b1
    ok = np.abs(det) > 1e-12
    det = np.where(ok, det, 1.0)
    x = (h[i] * b2 - h[j] * b1) / det
    y = (a1 * h[j] - a2 * h[i]) / det
    V = np.column_stack([x, y])[ok]
    V = V[np.all(V @ H.T <= h + tol.tau_set, axis=1)]
    uniq = []
    for v in V[np.lexsort((V[:, 0], V[:, 1]))]:
        if not any(np.max(np.abs(v - u)) <= tol.tau_set for u in uniq):
            uniq.append(v)
    V = np.array(uniq)
    center = V.mean(axis=0)
    ang = np.arctan2(V[:, 1] - center[1], V[:, 0] - center[0])
    V = V[np.argsort(ang, kind="stable")]
    start = int(np.lexsort((V[:, 0], V[:, 1]))[0])
    return np.roll(V, -start, axis=0)
