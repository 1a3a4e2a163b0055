"""Closed-loop runs of the set-valued feedback on the planar example.

Run with ``python3 demos/closed_loop.py``. Each disturbance policy drives
the system from the same start for a few hundred steps; the run raises if
a state ever leaves the outer set.
"""

import numpy as np

from rcinv import inflate, outer_approximation, simulate
from rcinv.controller import POLICIES
from rcinv.systems import planar_example


def main(steps=300):
    model, cons = planar_example()
    outer = outer_approximation(model, cons, 4 / 3**5)
    U_eff = inflate(cons.U, outer.delta)
    x0 = np.array([40.0, 35.0])
    for policy in POLICIES:
        traj = simulate(model, outer.R, U_eff, x0, steps, policy, seed=7)
        u = traj.inputs[:, 0]
        print(f"{policy:8s} steps {traj.steps}, all in set {bool(traj.in_set.all())}, "
              f"input range [{u.min():.4g}, {u.max():.4g}], "
              f"final state {np.round(traj.states[-1], 4).tolist()}")


if __name__ == "__main__":
    main()
