"""SVG plots built only from exported density/branch/component records.

Maxima use a white-to-red ramp and minima white-to-blue. Nothing here runs
the pipeline: callers pass the same dictionaries that are written to JSON/CSV.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET

import numpy as np

__all__ = ["ramp", "density_plot_1d", "density_plot_2d", "branch_plot"]

WIDTH, HEIGHT, MARGIN = 800.0, 400.0, 40.0


def ramp(kind: str, t: float) -> str:
    """Hex color for intensity ``t`` in [0, 1] on the type's ramp."""
    t = float(np.clip(t, 0.0, 1.0))
    fade = int(round(255 * (1 - t)))
    if kind == "maximum":
        r, g, b = 255, fade, fade
    elif kind == "minimum":
        r, g, b = fade, fade, 255
    else:
        r = g = b = fade
    return f"#{r:02x}{g:02x}{b:02x}"


def _num(x: float) -> str:
    return f"{x:.3f}"


class _Frame:
    def __init__(self, xlim, ylim, keep_aspect=False):
        (x0, x1), (y0, y1) = xlim, ylim
        if x1 <= x0:
            x1 = x0 + 1.0
        if y1 <= y0:
            y1 = y0 + 1.0
        sx = (WIDTH - 2 * MARGIN) / (x1 - x0)
        sy = (HEIGHT - 2 * MARGIN) / (y1 - y0)
        if keep_aspect:
            sx = sy = min(sx, sy)
        self.x0, self.y0, self.sx, self.sy = x0, y0, sx, sy

    def pt(self, x, y) -> tuple[str, str]:
        return _num(MARGIN + (x - self.x0) * self.sx), _num(HEIGHT - MARGIN - (y - self.y0) * self.sy)

    def points(self, xy) -> str:
        return " ".join(",".join(self.pt(x, y)) for x, y in xy)


def _root(title: str) -> ET.Element:
    svg = ET.Element("svg", xmlns="http://www.w3.org/2000/svg", width=_num(WIDTH), height=_num(HEIGHT),
                     viewBox=f"0 0 {WIDTH:.0f} {HEIGHT:.0f}")
    ET.SubElement(svg, "title").text = title
    ET.SubElement(svg, "rect", x="0", y="0", width=_num(WIDTH), height=_num(HEIGHT), fill="#ffffff")
    return svg


def _finish(svg: ET.Element) -> str:
    ET.indent(svg)
    return ET.tostring(svg, encoding="unicode") + "\n"


def _axis(svg, frame: _Frame, xlim):
    x1, y1 = frame.pt(xlim[0], frame.y0)
    x2, y2 = frame.pt(xlim[1], frame.y0)
    ET.SubElement(svg, "line", x1=x1, y1=y1, x2=x2, y2=y2, stroke="#000000")


def density_plot_1d(series: list[dict], title: str = "density", interpolate: bool = False) -> str:
    """One colored trace per UCP.

    ``series`` items: ``{"id", "type", "x": [...], "density": [...], "dual": [[lo, hi], ...]}``.
    Vertices with zero density are skipped, so an all-zero series leaves an
    empty group. With ``interpolate`` the trace is a polyline through the
    vertex values; otherwise each vertex paints its dual interval.
    """
    svg = _root(title)
    xs = [x for s in series for x in s["x"]] or [0.0, 1.0]
    top = max([max(s["density"], default=0.0) for s in series] + [0.0])
    frame = _Frame((min(xs), max(xs)), (0.0, top if top > 0 else 1.0))
    _axis(svg, frame, (min(xs), max(xs)))
    for s in series:
        g = ET.SubElement(svg, "g", {"class": "ucp", "data-id": str(s["id"]), "data-type": s["type"]})
        color = ramp(s["type"], 1.0)
        nz = [k for k, d in enumerate(s["density"]) if d > 0]
        if not nz:
            continue
        if interpolate:
            lo, hi = max(nz[0] - 1, 0), min(nz[-1] + 1, len(s["x"]) - 1)
            pts = [(s["x"][k], s["density"][k]) for k in range(lo, hi + 1)]
            ET.SubElement(g, "polyline", points=frame.points(pts), fill="none", stroke=color)
            continue
        for k in nz:
            d = s["density"][k]
            a, b = s["dual"][k]
            x1, y1 = frame.pt(a, d)
            x2, y2 = frame.pt(b, 0.0)
            ET.SubElement(g, "rect", x=x1, y=y1, width=_num(float(x2) - float(x1)),
                          height=_num(float(y2) - float(y1)), fill=ramp(s["type"], d / top), stroke=color,
                          **{"stroke-width": "0.5"})
    return _finish(svg)


def branch_plot(branches: list[dict], curves: list[dict], title: str = "analytic density") -> str:
    """Analytic mode: one filled curve per branch.

    ``branches`` as in the branch export; ``curves`` items
    ``{"branch": k, "x": [...], "density": [...]}``. Densities are clipped at
    the 98th percentile so the pole spikes do not flatten the plot.
    """
    svg = _root(title)
    lo = min((b["interval"][0] for b in branches), default=0.0)
    hi = max((b["interval"][1] for b in branches), default=1.0)
    dens = np.concatenate([np.asarray(c["density"], dtype=float) for c in curves]) if curves else np.zeros(1)
    cap = float(np.percentile(dens, 98)) if dens.size else 1.0
    cap = cap if cap > 0 else 1.0
    frame = _Frame((lo, hi), (0.0, cap))
    _axis(svg, frame, (lo, hi))
    for c in curves:
        b = branches[c["branch"]]
        xs = list(c["x"])
        ds = [min(d, cap) for d in c["density"]]
        pts = [(xs[0], 0.0)] + list(zip(xs, ds)) + [(xs[-1], 0.0)]
        ET.SubElement(svg, "polygon", {"class": "branch", "data-type": b["type"],
                                       "points": frame.points(pts), "fill": ramp(b["type"], 0.6),
                                       "stroke": ramp(b["type"], 1.0)})
    return _finish(svg)


def density_plot_2d(cells: list[dict], outlines: list[dict], title: str = "density",
                    triangles: list[dict] | None = None) -> str:
    """Colored dual cells plus component outlines.

    ``cells``: ``{"type", "polygon": [[x, y], ...], "value"}`` for vertices
    with positive density. ``outlines``: ``{"id", "type", "polygons": [...]}``
    as exported for supports. If ``triangles`` (``{"type", "polygon",
    "value"}``) is given it replaces the cells, giving a smoother display.
    """
    svg = _root(title)
    shapes = triangles if triangles is not None else cells
    pts = [p for s in shapes for p in s["polygon"]]
    pts += [p for o in outlines for poly in o["polygons"] for p in poly["exterior"]]
    if pts:
        P = np.asarray(pts, dtype=float)
        frame = _Frame((P[:, 0].min(), P[:, 0].max()), (P[:, 1].min(), P[:, 1].max()), keep_aspect=True)
    else:
        frame = _Frame((0.0, 1.0), (0.0, 1.0), keep_aspect=True)
    top = max([s["value"] for s in shapes] + [0.0]) or 1.0
    layer = ET.SubElement(svg, "g", {"class": "density"})
    for s in shapes:
        ET.SubElement(layer, "polygon", points=frame.points(s["polygon"]),
                      fill=ramp(s["type"], s["value"] / top), stroke="none")
    for o in outlines:
        g = ET.SubElement(svg, "g", {"class": "outline", "data-id": str(o["id"]), "data-type": o["type"]})
        for poly in o["polygons"]:
            d = "M " + " L ".join(" ".join(frame.pt(x, y)) for x, y in poly["exterior"]) + " Z"
            for hole in poly["holes"]:
                d += " M " + " L ".join(" ".join(frame.pt(x, y)) for x, y in hole) + " Z"
            ET.SubElement(g, "path", d=d, fill="none", stroke=ramp(o["type"], 1.0),
                          **{"stroke-width": "1.5", "fill-rule": "evenodd"})
    return _finish(svg)
