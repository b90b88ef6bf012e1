"""Deterministic SVG rendering of matchings and double-dimer overlays.

Edges are drawn in the planar embedding (10 px per lattice unit) and
colored by type: a-edges red, NE green, SE blue, b-edges yellow.  The
double-dimer mode overlays two matchings of the same size and draws only
their symmetric difference, which decomposes into loops.
"""

from __future__ import annotations

from .matching import DL, DR, UL, UR, Matching, black_xy, white_xy

COLORS = {DL: "#D62728", DR: "#2CA02C", UR: "#1F77B4", UL: "#FFD700"}
SCALE = 10


def _segments(m: Matching):
    segs = []
    for l in range(1, m.n + 1):
        for k in range(1, m.n + 2):
            d = int(m.dir[l - 1, k - 1])
            wx, wy = white_xy(m.n, l, k)
            bx, by = black_xy(m.n, *m.matched_black(l, k))
            segs.append((d, (wx, wy), (bx, by)))
    return segs


def _svg(segs, n: int) -> str:
    pad = 2
    lo = -(n + 1) - pad
    hi = (n + 1) + pad
    span = (hi - lo) * SCALE
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="0 0 {span} {span}" width="{span}" height="{span}">',
        f'<rect width="{span}" height="{span}" fill="white"/>',
    ]
    for d, (x0, y0), (x1, y1) in segs:
        pts = [((x - lo) * SCALE, (hi - y) * SCALE) for x, y in ((x0, y0), (x1, y1))]
        lines.append(
            '<line x1="%d" y1="%d" x2="%d" y2="%d" stroke="%s" '
            'stroke-width="4" stroke-linecap="round"/>'
            % (pts[0][0], pts[0][1], pts[1][0], pts[1][1], COLORS[d]))
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def render_matching(m: Matching) -> str:
    return _svg(_segments(m), m.n)


def render_double_dimer(m1: Matching, m2: Matching) -> str:
    """Only the symmetric difference of the two matchings is drawn."""
    if m1.n != m2.n:
        raise ValueError("matchings must have equal size")
    s1 = {(s[1], s[2], s[0]) for s in _segments(m1)}
    s2 = {(s[1], s[2], s[0]) for s in _segments(m2)}
    keep = s1 ^ s2
    segs = [(d, a, b) for (a, b, d) in sorted(keep, key=repr)]
    return _svg(segs, m1.n)
