"""Set-valued feedback from an invariant set and closed-loop simulation."""

from dataclasses import dataclass

import numpy as np

from .errors import EmptySetError, InputError, InvarianceViolation
from .lp import DEFAULT_TOL, chebyshev, support_point
from .polytope import HPolytope, bounding_box, inscribed_radius, relative_center
from .region import PolyUnion, as_union, erode_union

POLICIES = ("center", "extreme", "random")
MAX_REJECTIONS = 200


@dataclass
class Trajectory:
    """Closed-loop run of length ``T``.

    ``states`` has ``T + 1`` rows, ``inputs`` and ``disturbances`` have
    ``T`` rows, and ``in_set[t]`` records whether ``states[t]`` lies in the
    set within ``tau_set``.
    """

    states: np.ndarray
    inputs: np.ndarray
    disturbances: np.ndarray
    in_set: np.ndarray

    @property
    def steps(self):
        return self.inputs.shape[0]


def _input_slices(sys, E, U_eff, x):
    """Raw ``(H, h)`` pairs of ``{u : A x + B u in E_k} ∩ U_j``."""
    x = np.asarray(x, dtype=float).reshape(-1)
    out = []
    for Ek in E:
        Hu = Ek.H @ sys.B
        hu = Ek.h - Ek.H @ (sys.A @ x)
        for Uj in U_eff:
            out.append((np.vstack([Hu, Uj.H]), np.concatenate([hu, Uj.h])))
    return out


def admissible_inputs(sys, R, x, U_eff, eroded=None, tol=DEFAULT_TOL):
    """Inputs that keep every successor of ``x`` inside ``R``.

    Parameters
    ----------
    sys : SystemModel
    R : PolyUnion
        Target set.
    x : array_like
        Current state.
    U_eff : PolyUnion
        Admissible inputs, e.g. ``U`` or ``U`` inflated by ``delta``.
    eroded : PolyUnion, optional
        Precomputed ``R ⊖ W``; it does not depend on ``x``.

    Returns
    -------
    PolyUnion
        ``{u in U_eff : A x + B u + W ⊆ R}``; empty if no such input exists.
    """
    R, U_eff = as_union(R), as_union(U_eff)
    E = erode_union(R, sys.W, tol=tol) if eroded is None else eroded
    pieces = [HPolytope(H, h) for H, h in _input_slices(sys, E, U_eff, x)]
    return PolyUnion(pieces, dim=sys.m, tol=tol)


def _center(H, h, tol):
    c, r = chebyshev(HPolytope(H, h), tol)
    if c is not None and r < tol.tau_set:
        c = relative_center(HPolytope(H, h), tol)
    return c, r


def select_input(candidates, tol=DEFAULT_TOL):
    """Chebyshev center of the widest candidate piece.

    Ties go to the first piece in canonical order. Flat pieces fall back to
    a relative center, so a segment yields its midpoint.
    """
    candidates = as_union(candidates)
    if candidates.is_empty():
        raise EmptySetError("no admissible input")
    radii = [inscribed_radius(P, tol) for P in candidates]
    best = candidates.pieces[int(np.argmax(radii))]
    return _center(best.H, best.h, tol)[0]


def _select_raw(slices, tol):
    best, best_r = None, -np.inf
    for H, h in slices:
        c, r = _center(H, h, tol)
        if c is not None and r > best_r:
            best, best_r = c, r
    return best


class _DisturbanceSampler:
    """Draws ``w`` from the pieces of ``W`` according to a policy."""

    def __init__(self, W, policy, rng, tol):
        self.W = W.pieces
        self.policy = policy
        self.rng = rng
        self.tol = tol
        self.center = relative_center(self.W[0], tol) if policy == "center" else None

    def extreme(self, P):
        d = self.rng.standard_normal(P.dim)
        return support_point(P, d, self.tol)[1]

    def uniform(self, P):
        lo, hi = bounding_box(P, self.tol)
        if inscribed_radius(P, self.tol) >= self.tol.tau_set:
            for _ in range(MAX_REJECTIONS):
                w = self.rng.uniform(lo, hi)
                if P.contains(w, self.tol):
                    return w
        # flat piece or unlucky draws: mix a few extreme points
        pts = np.array([self.extreme(P) for _ in range(P.dim + 1)])
        lam = self.rng.dirichlet(np.ones(len(pts)))
        return lam @ pts

    def draw(self):
        if self.policy == "center":
            return self.center
        P = self.W[self.rng.integers(len(self.W))]
        return self.extreme(P) if self.policy == "extreme" else self.uniform(P)


def _in_union(R, x, tol):
    return any(P.contains(x, tol) for P in R)


def simulate(sys, R, U_eff, x0, T, policy="center", seed=0, tol=DEFAULT_TOL):
    """Run the feedback ``u = select_input(admissible_inputs(x))`` for ``T`` steps.

    Parameters
    ----------
    sys : SystemModel
    R : PolyUnion
        Candidate invariant set; ``x0`` must lie in it.
    U_eff : PolyUnion
        Input set used by the feedback.
    x0 : array_like
    T : int
        Number of steps.
    policy : {"center", "extreme", "random"}
        Disturbance policy. ``extreme`` maximizes a random direction over a
        random piece of ``W``; ``random`` samples a piece uniformly.
    seed : int
        Seed for ``numpy.random.default_rng``.

    Returns
    -------
    Trajectory

    Raises
    ------
    InvarianceViolation
        If some state has no admissible input or a successor leaves ``R``.
        The exception carries the state and the trajectory so far.
    """
    R, U_eff = as_union(R), as_union(U_eff)
    if policy not in POLICIES:
        raise InputError(f"unknown policy {policy!r}; choose from {', '.join(POLICIES)}")
    T = int(T)
    if T < 0:
        raise InputError("number of steps must be nonnegative")
    x = np.asarray(x0, dtype=float).reshape(-1)
    if x.size != sys.n:
        raise InputError(f"initial state has {x.size} entries, expected {sys.n}")
    if not _in_union(R, x, tol):
        raise InputError(f"initial state {x.tolist()} is not in the set")
    E = erode_union(R, sys.W, tol=tol)
    sampler = _DisturbanceSampler(sys.W, policy, np.random.default_rng(seed), tol)
    states, inputs, dists = [x], [], []

    def partial():
        k = len(inputs)
        return Trajectory(np.array(states[:k + 1]), np.array(inputs).reshape(k, sys.m),
                          np.array(dists).reshape(k, sys.n), np.ones(k + 1, dtype=bool))

    for t in range(T):
        u = _select_raw(_input_slices(sys, E, U_eff, x), tol)
        if u is None:
            raise InvarianceViolation(f"no admissible input at step {t}, state {x.tolist()}",
                                      state=x, trajectory=partial())
        w = np.asarray(sampler.draw(), dtype=float)
        nxt = sys.A @ x + sys.B @ u + w
        inputs.append(u)
        dists.append(w)
        if not _in_union(R, nxt, tol):
            traj = partial()
            raise InvarianceViolation(f"successor of step {t} left the set: {nxt.tolist()}",
                                      state=nxt, trajectory=traj)
        states.append(nxt)
        x = nxt
    return Trajectory(np.array(states), np.array(inputs).reshape(T, sys.m),
                      np.array(dists).reshape(T, sys.n), np.ones(T + 1, dtype=bool))
