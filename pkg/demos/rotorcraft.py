"""Outer approximation for a four-state rotor craft position model.

Run with ``python3 demos/rotorcraft.py [outdir]``. Without obstacles the
iteration stops after one step. The script prints the effort constant,
checks the certificate with inflated inputs and plots the position slice
at zero velocity. A two-step window needs c = 1.15; windows of three or
more steps bring c down to 1.
"""

import os
import sys

from rcinv import check_rci, inflate, outer_approximation
from rcinv.plotting import polygons, to_svg
from rcinv.systems import rotorcraft


def main(outdir="."):
    model, cons = rotorcraft(obstacles=0)
    os.makedirs(outdir, exist_ok=True)
    res = outer_approximation(model, cons, epsilon=0.1, window=2)
    print(f"verdict {res.verdict}, stop index {res.stop_index}, c = {res.c:.6g}, "
          f"delta = {res.delta:.6g}, pieces {res.trace.piece_counts}")
    v = check_rci(model, res.R, inflate(cons.U, res.delta))
    print(f"RCI with inflated inputs: {v.passed}")

    fixed = {2: 0.0, 3: 0.0}
    layers = [("X", polygons(cons.X, (0, 1), fixed)), ("outer", polygons(res.R, (0, 1), fixed))]
    path = os.path.join(outdir, "rotorcraft_positions.svg")
    with open(path, "w", encoding="utf-8") as f:
        f.write(to_svg(layers))
    print(f"wrote {path}")


if __name__ == "__main__":
    main(*sys.argv[1:2])
