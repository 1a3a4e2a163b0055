"""Ready-made benchmark systems."""

import numpy as np

from .invariance import ConstraintSpec, SystemModel
from .polytope import HPolytope, box
from .region import PolyUnion, region_diff

# first two coordinates of the rotor-craft obstacle centers
OBSTACLE_CENTERS = np.array([
    [-8, -5, -13, -22, -11, -22, -10, -2, -15, -17],
    [1, 5, -8, -2, 4, 3, -1, 7, -6, 5],
], dtype=float).T


def planar_example():
    """Two-state system with a diagonal segment disturbance.

    ``A = [[0, 1], [1, 1]]``, ``B = [0, 1]'``, ``W = {a (1, 1) : |a| <= 1}``,
    ``U = [-100, 100]`` and the triangle ``X = {x1 + x2 <= 100,
    -3 x1 + x2 <= -50, x2 >= 26}``. Its maximal robust controlled invariant
    set is the triangle with third offset ``-26.5``.
    """
    A = np.array([[0.0, 1.0], [1.0, 1.0]])
    B = np.array([[0.0], [1.0]])
    W = HPolytope([[1, -1], [-1, 1], [1, 0], [-1, 0]], [0, 0, 1, 1])
    X = HPolytope(PLANAR_H, [100, -50, -26])
    U = box([-100], [100])
    return SystemModel(A, B, PolyUnion([W])), ConstraintSpec(PolyUnion([X]), PolyUnion([U]))


PLANAR_H = np.array([[1.0, 1.0], [-3.0, 1.0], [0.0, -1.0]])


def planar_iterate(i):
    """Closed-form i-th outer iterate of ``planar_example``."""
    third = -(25.0 + sum(3.0 ** -j for j in range(i + 1)))
    return HPolytope(PLANAR_H, [100.0, -50.0, third])


def planar_maximal_set():
    return HPolytope(PLANAR_H, [100.0, -50.0, -26.5])


def rotorcraft(tau=2.6, wbar=0.1, v_max=0.5, a_max=0.17, obstacles=0):
    """Planar double integrator sampled with period ``tau``.

    States are (position, velocity), inputs accelerations. The first
    ``obstacles`` entries of ``OBSTACLE_CENTERS`` are removed from the
    position box, each extended over all velocities.
    """
    I2 = np.eye(2)
    Z2 = np.zeros((2, 2))
    A = np.block([[I2, tau * I2], [Z2, I2]])
    B = np.vstack([0.5 * tau ** 2 * I2, tau * I2])
    w_max = wbar * a_max
    half = w_max * np.array([0.5 * tau ** 2, 0.5 * tau ** 2, tau, tau])
    W = box(-half, half)
    outer = box([-35, -10, -v_max, -v_max], [5, 10, v_max, v_max])
    if obstacles:
        holes = [box([c[0] - 4, c[1] - 1, -v_max, -v_max], [c[0] + 4, c[1] + 1, v_max, v_max])
                 for c in OBSTACLE_CENTERS[:obstacles]]
        X = region_diff(outer, PolyUnion(holes))
    else:
        X = PolyUnion([outer])
    U = PolyUnion([box([-a_max, -a_max], [a_max, a_max])])
    return SystemModel(A, B, PolyUnion([W])), ConstraintSpec(X, U)
