"""Ceva-configuration figures on the 2-simplex.

Homogeneous points <x1,x2,x3> are drawn at their barycentric position in a
fixed triangle.  The sector C_ij (for the pair i<j with third index k) is
drawn as the fan from vertex k over the boundary segments of U_ij on the
edge ij.  Floats appear only here, for rendering.
"""

from __future__ import annotations

from fractions import Fraction

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.patches import Polygon  # noqa: E402

from .ceva import CevaInput  # noqa: E402
from .ratcore import INF, fmt_ext  # noqa: E402

VERTICES = ((0.0, 0.0), (1.0, 0.0), (0.5, 0.8660254037844386))
_PAIRS = (("U12", 1, 2, 3, "#4c72b0"), ("U23", 2, 3, 1, "#dd8452"), ("U13", 1, 3, 2, "#55a868"))


def to_plane(point) -> tuple:
    s = sum(Fraction(v) for v in point)
    if s == 0:
        raise ValueError("the origin has no position on the simplex")
    w = [float(Fraction(v) / s) for v in point]
    return (sum(w[k] * VERTICES[k][0] for k in range(3)), sum(w[k] * VERTICES[k][1] for k in range(3)))


def edge_point(i: int, j: int, r) -> tuple:
    """The point of edge ij with x_j / x_i = r (r = inf gives vertex j)."""
    pt = [0, 0, 0]
    if r is INF:
        pt[j - 1] = 1
    else:
        pt[i - 1], pt[j - 1] = 1, r
    return tuple(pt)


def _label(pt) -> str:
    return "<" + ",".join(fmt_ext(Fraction(v)) for v in pt) + ">"


def plot_ceva(inp: CevaInput, out: str, title: str = "") -> str:
    matplotlib.rcParams["svg.hashsalt"] = "cevian"
    fig, ax = plt.subplots(figsize=(6, 5.4))
    tri = Polygon(VERTICES, closed=True, fill=False, edgecolor="black", linewidth=1.0)
    ax.add_patch(tri)
    for name, i, j, k, color in _PAIRS:
        u = getattr(inp, name)
        for iv in u.intervals:
            a = to_plane(edge_point(i, j, iv.lo))
            b = to_plane(edge_point(i, j, iv.hi))
            apex = VERTICES[k - 1]
            ax.add_patch(Polygon((apex, a, b), closed=True, facecolor=color, alpha=0.18, edgecolor="none"))
            ax.plot([a[0], b[0]], [a[1], b[1]], color=color, linewidth=4.0, solid_capstyle="butt")
    x = _initial_end(inp.U12)
    y = _initial_end(inp.U23)
    if x is not None and y is not None:
        feet = (edge_point(1, 2, x), edge_point(2, 3, y), edge_point(1, 3, x * y))
        offsets = ((-10, -14), (6, 0), (-62, 0))
        for foot, apex, off in zip(feet, (3, 1, 2), offsets):
            p, q = to_plane(foot), VERTICES[apex - 1]
            ax.plot([p[0], q[0]], [p[1], q[1]], color="black", linewidth=0.8, linestyle="--")
            ax.annotate(_label(foot), p, textcoords="offset points", xytext=off, fontsize=8)
        centre = (1, x, x * y)
        c = to_plane(centre)
        ax.plot([c[0]], [c[1]], marker="o", color="black", markersize=3)
        ax.annotate(_label(centre), c, textcoords="offset points", xytext=(5, 5), fontsize=8)
    for k, (vx, vy) in enumerate(VERTICES):
        pt = [0, 0, 0]
        pt[k] = 1
        ax.annotate(_label(pt), (vx, vy), textcoords="offset points",
                    xytext=(-18 if k == 0 else 4, -12 if k < 2 else 6), fontsize=8)
    if title:
        ax.set_title(title, fontsize=10)
    ax.set_xlim(-0.12, 1.12)
    ax.set_ylim(-0.1, 0.95)
    ax.set_aspect("equal")
    ax.axis("off")
    fmt = out.rsplit(".", 1)[-1].lower() if "." in out else "svg"
    meta = {"Date": None} if fmt == "svg" else {}
    fig.savefig(out, format=fmt, metadata=meta or None)
    plt.close(fig)
    return out


def _initial_end(u):
    if len(u.intervals) == 1:
        iv = u.intervals[0]
        if iv.lo == 0 and iv.lo_closed and iv.hi is not INF and not iv.hi_closed:
            return iv.hi
    return None
