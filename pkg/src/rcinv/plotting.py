"""Planar views of polytope unions as SVG or vertex CSV.

Higher-dimensional sets are first cut at fixed coordinates and the
remaining free coordinates are projected away. Such views are for
inspection only; a slice of an invariant set need not be invariant.
"""

import numpy as np

from .errors import DegenerateError, InputError
from .lp import DEFAULT_TOL
from .polytope import HPolytope, project_eliminate, vertices_2d

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")
WIDTH = 480
PAD = 24


def parse_slice(text):
    """``"2=0,3=0.5"`` -> ``{2: 0.0, 3: 0.5}``."""
    out = {}
    if not text:
        return out
    for item in text.split(","):
        try:
            k, v = item.split("=")
            out[int(k)] = float(v)
        except ValueError as e:
            raise InputError(f"bad slice entry {item!r}; expected index=value") from e
    return out


def planar_piece(P, dims, fixed, tol=DEFAULT_TOL):
    """Cut ``P`` at ``fixed`` coordinates and project onto ``dims``."""
    n = P.dim
    if len(dims) != 2 or len(set(dims)) != 2 or not all(0 <= d < n for d in dims):
        raise InputError(f"dims must name two distinct coordinates below {n}, got {dims}")
    bad = [k for k in fixed if not 0 <= k < n or k in dims]
    if bad:
        raise InputError(f"cannot slice at coordinates {bad}")
    free = [j for j in range(n) if j not in fixed]
    v = np.zeros(n)
    for k, val in fixed.items():
        v[k] = val
    Q = HPolytope(P.H[:, free], P.h - P.H @ v)
    if len(free) == 2:
        keep = [free.index(d) for d in dims]
        return HPolytope(Q.H[:, keep], Q.h)
    return project_eliminate(Q, [free.index(d) for d in dims], tol)


def polygons(S, dims=(0, 1), fixed=None, tol=DEFAULT_TOL):
    """Vertex cycles of the planar view; flat or empty cuts are skipped."""
    out = []
    for P in S:
        try:
            out.append(vertices_2d(planar_piece(P, list(dims), fixed or {}, tol), tol))
        except DegenerateError:
            continue
    return out


def _fmt(x):
    return f"{x:.6g}"


def to_csv(layers):
    """``layers`` is a list of ``(label, [vertex arrays])``."""
    lines = ["set,piece,vertex,x,y"]
    for label, polys in layers:
        for p, V in enumerate(polys):
            for k, (x, y) in enumerate(V):
                lines.append(f"{label},{p},{k},{float(x)!r},{float(y)!r}")
    return "\n".join(lines) + "\n"


def to_svg(layers, dims=(0, 1)):
    """Layered filled polygons with a fixed 480 px wide canvas."""
    pts = [V for _, polys in layers for V in polys]
    head = ('<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
            'viewBox="0 0 {w} {h}">')
    if not pts:
        h = WIDTH // 2
        return "\n".join([
            head.format(w=WIDTH, h=h),
            f'<text x="{WIDTH // 2}" y="{h // 2}" text-anchor="middle" '
            'font-family="sans-serif" font-size="14">empty set</text>',
            "</svg>", ""])
    allv = np.vstack(pts)
    lo, hi = allv.min(axis=0), allv.max(axis=0)
    span = np.maximum(hi - lo, 1e-12)
    scale = (WIDTH - 2 * PAD) / max(span)
    height = int(np.ceil(span[1] * scale)) + 2 * PAD

    def xy(v):
        return PAD + (v[0] - lo[0]) * scale, height - PAD - (v[1] - lo[1]) * scale

    out = [head.format(w=WIDTH, h=height)]
    for k, (label, polys) in enumerate(layers):
        color = COLORS[k % len(COLORS)]
        out.append(f'<g id="{label}" fill="{color}" fill-opacity="0.35" stroke="{color}">')
        for V in polys:
            coords = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in map(xy, V))
            out.append(f'<polygon points="{coords}"/>')
        out.append("</g>")
    out.append(f'<text x="{PAD}" y="{height - 4}" font-family="sans-serif" font-size="11">'
               f'x{dims[0]} in [{_fmt(lo[0])}, {_fmt(hi[0])}], '
               f'x{dims[1]} in [{_fmt(lo[1])}, {_fmt(hi[1])}]</text>')
    out += ["</svg>", ""]
    return "\n".join(out)
