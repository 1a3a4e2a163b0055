"""Outer and inner approximations for the planar worked example.

Run with ``python3 demos/planar_outer_inner.py [outdir]``. The script
prints the iteration history of both approximations, checks the one-step
certificates and writes an SVG that overlays X, the outer set and the
inner set.
"""

import os
import sys

from rcinv import check_rci, inflate, inner_approximation, outer_approximation
from rcinv.model_io import save_model
from rcinv.plotting import polygons, to_svg
from rcinv.systems import planar_example


def main(outdir="."):
    model, cons = planar_example()
    os.makedirs(outdir, exist_ok=True)
    save_model(os.path.join(outdir, "planar_model.json"), model, cons)

    # relaxed constraints: stop once two iterates are within epsilon
    eps = 4 / 3**5
    outer = outer_approximation(model, cons, eps)
    print(f"outer: verdict {outer.verdict}, stop index {outer.stop_index}, "
          f"c = {outer.c:g}, delta = {outer.delta:.6g}")
    print(f"  pieces per iterate: {outer.trace.piece_counts}")
    v = check_rci(model, outer.R, inflate(cons.U, outer.delta))
    print(f"  RCI with inflated inputs: {v.passed}")

    # tightened disturbance: every iterate is already invariant for the true W
    inner = inner_approximation(model, cons, rho=1.0)
    print(f"inner: verdict {inner.verdict}, stop index {inner.stop_index}")
    print(f"  RCI with nominal inputs: {check_rci(model, inner.R, cons.U).passed}")

    # X itself is not invariant; the residual is the distance to its predecessor set
    v = check_rci(model, cons.X, cons.U)
    print(f"X alone: RCI {v.passed}, residual {v.residual:.6g}")

    layers = [("X", polygons(cons.X)), ("outer", polygons(outer.R)),
              ("inner", polygons(inner.R))]
    path = os.path.join(outdir, "planar_sets.svg")
    with open(path, "w", encoding="utf-8") as f:
        f.write(to_svg(layers))
    print(f"wrote {path}")


if __name__ == "__main__":
    main(*sys.argv[1:2])
