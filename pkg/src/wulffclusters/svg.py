"""Minimal hand-rolled SVG export for Wulff shapes and clusters."""

import numpy as np

_HEADER = ('<?xml version="1.0" encoding="UTF-8"?>\n'
           '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
           'width="{w}" height="{h}" viewBox="{vb}">\n')

_CHAMBER_FILL = {1: "#f4c26b", 2: "#bcd9ea", 3: "#cfe8cf", 4: "#e6cfe8"}


def _fmt(x):
    return f"{x:.6f}"


def _path_d(points, closed=False):
    pts = np.asarray(points, dtype=float)
    parts = [f"M {_fmt(pts[0, 0])} {_fmt(-pts[0, 1])}"]
    parts += [f"L {_fmt(p[0])} {_fmt(-p[1])}" for p in pts[1:]]
    if closed:
        parts.append("Z")
    return " ".join(parts)


class SvgCanvas:
    """Collects SVG elements and tracks the bounding box (y flipped up)."""

    def __init__(self):
        self.elements = []
        self.lo = None
        self.hi = None

    def _grow(self, points):
        pts = np.asarray(points, dtype=float) * np.array([1.0, -1.0])
        lo = pts.min(axis=0)
        hi = pts.max(axis=0)
        self.lo = lo if self.lo is None else np.minimum(self.lo, lo)
        self.hi = hi if self.hi is None else np.maximum(self.hi, hi)

    def polyline(self, points, stroke="#222222", width=1.0, fill="none",
                 closed=False):
        self._grow(points)
        self.elements.append(
            f'<path d="{_path_d(points, closed)}" fill="{fill}" '
            f'stroke="{stroke}" stroke-width="{{sw{width}}}" '
            f'stroke-linejoin="round" stroke-linecap="round"/>')

    def circle(self, center, radius, stroke="#888888", dashed=True):
        c = np.asarray(center, dtype=float)
        self._grow([c - radius, c + radius])
        dash = ' stroke-dasharray="{sw4} {sw4}"' if dashed else ""
        self.elements.append(
            f'<circle cx="{_fmt(c[0])}" cy="{_fmt(-c[1])}" '
            f'r="{_fmt(radius)}" fill="none" stroke="{stroke}" '
            f'stroke-width="{{sw0.5}}"{dash}/>')

    def dot(self, point, color="#cc3333"):
        p = np.asarray(point, dtype=float)
        self._grow([p])
        self.elements.append(
            f'<circle cx="{_fmt(p[0])}" cy="{_fmt(-p[1])}" r="{{sw2}}" '
            f'fill="{color}"/>')

    def text(self, point, s, size=10.0, color="#444444"):
        p = np.asarray(point, dtype=float)
        self._grow([p])
        self.elements.append(
            f'<text x="{_fmt(p[0])}" y="{_fmt(-p[1])}" '
            f'font-size="{{sw{size}}}" font-family="sans-serif" '
            f'fill="{color}" text-anchor="middle">{s}</text>')

    def render(self, px=640):
        lo, hi = self.lo, self.hi
        span = float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-9))
        pad = 0.05 * span
        vb = (f"{_fmt(lo[0] - pad)} {_fmt(lo[1] - pad)} "
              f"{_fmt(hi[0] - lo[0] + 2 * pad)} "
              f"{_fmt(hi[1] - lo[1] + 2 * pad)}")
        # stroke widths were recorded in px; convert to user units
        unit = (span + 2 * pad) / px
        body = "\n".join(self.elements)
        out = []
        i = 0
        while i < len(body):
            j = body.find("{sw", i)
            if j < 0:
                out.append(body[i:])
                break
            out.append(body[i:j])
            k = body.index("}", j)
            out.append(_fmt(float(body[j + 3:k]) * unit))
            i = k + 1
        return (_HEADER.format(w=px, h=px, vb=vb) + "".join(out)
                + "\n</svg>\n")

    def save(self, path, px=640):
        with open(path, "w") as f:
            f.write(self.render(px))


def wulff_svg(boundary, path):
    """Write the Wulff boundary polyline (closed, filled) to an SVG file."""
    cv = SvgCanvas()
    cv.polyline(boundary.vertices, closed=True, fill="#f4c26b88",
                stroke="#8a5a00", width=1.5)
    cv.dot([0.0, 0.0], color="#8a5a00")
    cv.save(path)
    return path


def cluster_svg(cluster, path):
    """Write a cluster drawing: chamber fill, interfaces, junctions, ball."""
    cv = SvgCanvas()
    cv.circle([0.0, 0.0], cluster.R)
    poly = cluster.e1_polygon()
    if poly is not None and len(poly):
        cv.polyline(poly, closed=True, fill=_CHAMBER_FILL[1] + "88",
                    stroke="none", width=0.0)
    for k, iface in enumerate(cluster.interfaces):
        color = "#1f4e79" if iface.kind == "arc" else "#555555"
        cv.polyline(iface.points, stroke=color, width=1.5)
        mid = np.asarray(iface.points)[len(iface.points) // 2]
        cv.text(mid, f"{iface.pair[0]}|{iface.pair[1]}", size=11.0)
    for j in cluster.junctions:
        cv.dot(j)
    cv.save(path)
    return path
