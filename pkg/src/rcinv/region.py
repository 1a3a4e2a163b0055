"""Finite unions of polytopes and the non-convex set algebra on them."""

import numpy as np

from .errors import EpsilonExceeded, InputError, ResourceError
from .lp import DEFAULT_TOL
from .polytope import (
    HPolytope,
    affine_hull,
    bounding_box,
    box,
    canonicalize,
    convex_subset,
    erode_convex,
    inscribed_radius,
    intersect,
    minkowski_sum,
    relative_chebyshev,
    unit_ball,
)


class PolyUnion:
    """Finite union of canonical, nonempty polytopes of a common dimension.

    Pieces may overlap. The piece list is sorted and free of duplicates so
    that equal inputs give identical unions.
    """

    __slots__ = ("pieces", "dim")

    def __init__(self, pieces=(), dim=None, tol=DEFAULT_TOL):
        pieces = list(pieces)
        if dim is None:
            if not pieces:
                raise InputError("dimension of an empty union must be given")
            dim = pieces[0].dim
        out = []
        for P in pieces:
            if P.dim != dim:
                raise InputError(f"piece of dimension {P.dim} in a union of dimension {dim}")
            P = canonicalize(P, tol)
            if not P.is_empty(tol):
                out.append(P)
        if len(out) > tol.max_pieces:
            raise ResourceError(f"union has {len(out)} pieces, cap is {tol.max_pieces}")
        out.sort(key=HPolytope.sort_key)
        uniq = []
        for P in out:
            if not uniq or not uniq[-1].same_as(P, atol=1e-12):
                uniq.append(P)
        self.pieces = tuple(uniq)
        self.dim = dim

    @classmethod
    def empty(cls, n):
        return cls((), dim=n)

    @classmethod
    def of(cls, *pieces):
        return cls(pieces)

    def is_empty(self):
        return not self.pieces

    def __len__(self):
        return len(self.pieces)

    def __iter__(self):
        return iter(self.pieces)

    @property
    def n_halfspaces(self):
        return sum(P.nrows for P in self.pieces)

    def contains(self, x, tol=DEFAULT_TOL):
        return any(P.contains(x, tol) for P in self.pieces)

    def bounding_box(self, tol=DEFAULT_TOL):
        if not self.pieces:
            return None
        boxes = [bounding_box(P, tol) for P in self.pieces]
        lo = np.min([b[0] for b in boxes], axis=0)
        hi = np.max([b[1] for b in boxes], axis=0)
        return lo, hi

    def __repr__(self):
        return f"PolyUnion(dim={self.dim}, pieces={len(self.pieces)})"


def as_union(S):
    if isinstance(S, PolyUnion):
        return S
    if isinstance(S, HPolytope):
        return PolyUnion([S], dim=S.dim)
    raise InputError(f"expected a polytope or a union, got {type(S).__name__}")


def _boxes_overlap(a, b, slack):
    return bool(np.all(a[0] <= b[1] + slack) and np.all(b[0] <= a[1] + slack))


def _box_inside(a, b, slack):
    return bool(np.all(a[0] >= b[0] - slack) and np.all(a[1] <= b[1] + slack))


def _thickness_weights(P, tol):
    """Row-weight function measuring inscribed radius within aff(P)."""
    hull = affine_hull(P, tol)
    if hull.full:
        return lambda H: np.abs(H).sum(axis=1)
    V = hull.basis
    if V.shape[1] == 0:
        return lambda H: np.zeros(H.shape[0])
    return lambda H: np.linalg.norm(H @ V, axis=1)


def region_diff(P, cutters, tol=DEFAULT_TOL):
    """``P`` minus the union of ``cutters`` as a union of closed polytopes.

    Residual pieces thinner than ``tau_set`` (measured inside the affine hull
    of ``P``) are discarded, so results agree with the exact difference up to
    boundary slivers.
    """
    cutters = as_union(cutters)
    if cutters.dim != P.dim:
        raise InputError(f"dimension mismatch: {P.dim} vs {cutters.dim}")
    P = canonicalize(P, tol)
    if P.is_empty(tol):
        return PolyUnion.empty(P.dim)
    if not cutters.pieces:
        return PolyUnion([P])
    weigh = _thickness_weights(P, tol)
    pbox = bounding_box(P, tol)
    cut = [Q for Q in cutters if _boxes_overlap(bounding_box(Q, tol), pbox, tol.tau_set)]
    prune_at = P.nrows + 4 * P.dim + 16

    def thick(H, h):
        return relative_chebyshev(H, h, weigh(H), tol)[1] >= tol.tau_set

    out = []
    stack = [(P.H, P.h, 0)]
    while stack:
        H, h, start = stack.pop()
        j = start
        while j < len(cut) and not thick(np.vstack([H, cut[j].H]), np.concatenate([h, cut[j].h])):
            j += 1
        if j == len(cut):
            out.append(HPolytope(H, h))
            if len(out) > tol.max_pieces:
                raise ResourceError(f"region difference exceeded {tol.max_pieces} pieces")
            continue
        Q = cut[j]
        accH, acch = H, h
        for q, b in zip(Q.H, Q.h):
            subH = np.vstack([accH, -q])
            subh = np.append(acch, -b)
            if thick(subH, subh):
                if subH.shape[0] > prune_at:
                    S = canonicalize(HPolytope(subH, subh), tol)
                    subH, subh = S.H, S.h
                stack.append((subH, subh, j + 1))
            accH = np.vstack([accH, q])
            acch = np.append(acch, b)
    return PolyUnion(out, dim=P.dim, tol=tol)


def is_subset(A, B, tol=DEFAULT_TOL):
    """True iff every piece of ``A`` is covered by ``B`` up to ``tau_set`` slivers."""
    A, B = as_union(A), as_union(B)
    if A.dim != B.dim:
        raise InputError(f"dimension mismatch: {A.dim} vs {B.dim}")
    for P in A:
        pbox = bounding_box(P, tol)
        cand = [Q for Q in B if _boxes_overlap(bounding_box(Q, tol), pbox, tol.tau_set)]
        if not cand:
            return False
        if any(_box_inside(pbox, bounding_box(Q, tol), tol.tau_set) and convex_subset(P, Q, tol)
               for Q in cand):
            continue
        if not region_diff(P, PolyUnion(cand, dim=A.dim), tol).is_empty():
            return False
    return True


def set_equal(A, B, tol=DEFAULT_TOL):
    return is_subset(A, B, tol) and is_subset(B, A, tol)


def union(A, B, tol=DEFAULT_TOL):
    A, B = as_union(A), as_union(B)
    return PolyUnion(A.pieces + B.pieces, dim=A.dim, tol=tol)


def intersect_unions(A, B, tol=DEFAULT_TOL):
    """Pairwise piece intersection.

    Intersections of two full-dimensional pieces that come out thinner than
    ``tau_set`` are boundary contacts and are dropped.
    """
    A, B = as_union(A), as_union(B)
    if A.dim != B.dim:
        raise InputError(f"dimension mismatch: {A.dim} vs {B.dim}")
    out = []
    for P in A:
        pbox = bounding_box(P, tol)
        for Q in B:
            if not _boxes_overlap(pbox, bounding_box(Q, tol), tol.tau_set):
                continue
            R = intersect(P, Q, tol)
            if R.is_empty(tol):
                continue
            if (inscribed_radius(R, tol) < tol.tau_set and inscribed_radius(P, tol) >= tol.tau_set
                    and inscribed_radius(Q, tol) >= tol.tau_set):
                continue
            out.append(R)
    return simplify(PolyUnion(out, dim=A.dim, tol=tol), tol)


def simplify(S, tol=DEFAULT_TOL):
    """Drop pieces contained in another single piece."""
    pieces = list(S.pieces)
    if len(pieces) < 2:
        return S
    boxes = [bounding_box(P, tol) for P in pieces]
    keep = [True] * len(pieces)
    for i, P in enumerate(pieces):
        for j, Q in enumerate(pieces):
            if i == j or not keep[j]:
                continue
            if _box_inside(boxes[i], boxes[j], tol.tau_set) and convex_subset(P, Q, tol):
                keep[i] = False
                break
    return PolyUnion([P for P, k in zip(pieces, keep) if k], dim=S.dim, tol=tol)


def inflate(S, eps, tol=DEFAULT_TOL):
    """Minkowski sum of every piece with the box ``eps * [-1, 1]^n``."""
    S = as_union(S)
    if eps < 0:
        raise InputError("inflation radius must be nonnegative; use erode_union to shrink")
    if eps == 0 or S.is_empty():
        return S
    ball = unit_ball(S.dim, eps)
    return PolyUnion([minkowski_sum(P, ball, tol) for P in S], dim=S.dim, tol=tol)


def _radius_about_origin(Q, tol):
    lo, hi = bounding_box(Q, tol)
    return float(max(np.abs(lo).max(), np.abs(hi).max()))


def erode_union(S, Q, box_override=None, tol=DEFAULT_TOL):
    """``{z : z + Q ⊆ S}`` for a union ``S``.

    ``Q`` may be a polytope or a union; erosion by a union is the
    intersection of the erosions by its pieces. A single-piece ``S`` uses the
    convex support-function rule; otherwise the complement identity
    ``S ⊖ Q = box \\ ((box \\ S) ⊕ (-Q))`` is evaluated.
    """
    S = as_union(S)
    if isinstance(Q, PolyUnion):
        if Q.is_empty():
            raise InputError("erosion by an empty set is not defined")
        result = None
        for Qk in Q:
            Ek = erode_union(S, Qk, box_override, tol)
            result = Ek if result is None else intersect_unions(result, Ek, tol)
            if result.is_empty():
                break
        return result
    if Q.dim != S.dim:
        raise InputError(f"dimension mismatch: {S.dim} vs {Q.dim}")
    if Q.is_empty(tol):
        raise InputError("erosion by an empty set is not defined")
    if S.is_empty():
        return S
    if len(S) == 1:
        return PolyUnion([erode_convex(S.pieces[0], Q, tol)], dim=S.dim, tol=tol)

    r = _radius_about_origin(Q, tol)
    lo, hi = S.bounding_box(tol)
    margin = 2.0 * (r + 1.0)
    big = box(lo - margin, hi + margin)
    if box_override is not None:
        if not convex_subset(big, box_override, tol):
            raise InputError("erosion box must contain the bounding box of the set "
                             f"inflated by {margin:g}")
        big = box_override
    outside = region_diff(big, S, tol)
    negQ = HPolytope(-Q.H, Q.h)
    grown = PolyUnion([minkowski_sum(C, negQ, tol) for C in outside], dim=S.dim, tol=tol)
    inner = box(lo - r, hi + r)
    return simplify(region_diff(inner, grown, tol), tol)


def gap_epsilon(A, B, eps_max, tol_eps=1e-7, tol=DEFAULT_TOL):
    """Smallest ``eps`` (within ``tol_eps``) with ``A ⊆ B + eps*[-1,1]^n``."""
    A, B = as_union(A), as_union(B)
    if tol_eps <= 0:
        raise InputError("bisection tolerance must be positive")
    if A.is_empty():
        return 0.0
    if not is_subset(A, inflate(B, eps_max, tol), tol):
        raise EpsilonExceeded(f"set is not within {eps_max:g} of the reference set")
    if is_subset(A, B, tol):
        return 0.0
    lo, hi = 0.0, float(eps_max)
    while hi - lo > tol_eps:
        mid = 0.5 * (lo + hi)
        if is_subset(A, inflate(B, mid, tol), tol):
            hi = mid
        else:
            lo = mid
    return hi


def hausdorff_gap(A, B, eps_max, tol_eps=1e-7, tol=DEFAULT_TOL):
    """Infinity-norm Hausdorff distance up to ``tol_eps``."""
    return max(gap_epsilon(A, B, eps_max, tol_eps, tol), gap_epsilon(B, A, eps_max, tol_eps, tol))
