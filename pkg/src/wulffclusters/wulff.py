"""Wulff shapes: boundary construction, measures and scalings.

The Wulff shape of a density phi is the intersection of the half-planes
{x . y <= phi(y)} over unit vectors y; for regular densities its boundary
is the image of the unit circle under the gradient map F = grad phi.
All boundaries are closed convex polylines, oriented counter-clockwise,
without a repeated closing vertex.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .anisotropy import TWO_PI, Anisotropy
from .errors import (DegenerateIntersection, DuplicateVertex, NotRegular,
                     ZeroVector)


@dataclass
class WulffBoundary:
    """Closed convex polyline sampling of a (scaled) Wulff boundary.

    ``normals[k]`` is the outward unit normal whose gradient-map image is
    ``vertices[k] / lam`` (exact for gradient_map provenance, a bisector
    convention for half-plane provenance).
    """

    vertices: np.ndarray            # (n, 2), counter-clockwise
    normals: np.ndarray             # (n, 2)
    lam: float = 1.0
    provenance: str = "gradient_map"

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float)
        self.normals = np.asarray(self.normals, dtype=float)

    def scaled(self, factor):
        return WulffBoundary(self.vertices * factor, self.normals,
                             self.lam * factor, self.provenance)

    def to_dict(self):
        return {"vertices": self.vertices.tolist(),
                "normals": self.normals.tolist(),
                "lambda": self.lam,
                "provenance": self.provenance}

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d):
        return cls(np.asarray(d["vertices"]), np.asarray(d["normals"]),
                   d.get("lambda", 1.0), d.get("provenance", "gradient_map"))


def boundary_by_gradient_map(a: Anisotropy, n: int) -> WulffBoundary:
    """Sample the boundary as grad phi at n equally spaced normal angles."""
    if n < 64:
        raise ValueError("gradient-map sampling needs n >= 64")
    if not a.is_regular:
        raise NotRegular(f"{a.kind} is not C^2 + uniformly convex")
    theta = np.arange(n) * TWO_PI / n
    verts = a.gradient_at_angle(theta)
    normals = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    return WulffBoundary(verts, normals, 1.0, "gradient_map")


def boundary_by_halfplane_intersection(a: Anisotropy, n: int) -> WulffBoundary:
    """Intersect the half-planes {x . y_k <= phi(y_k)} over n directions.

    Works for any anisotropy, crystalline included; for the l1 density with
    n a multiple of 4 it returns exactly the square [-1, 1]^2.  Since phi is
    convex and 1-homogeneous, every half-plane is a supporting half-plane of
    the Wulff shape, so consecutive line intersections enumerate the
    vertices of the circumscribed polygon.
    """
    if n < 3:
        raise ValueError("half-plane intersection needs n >= 3")
    theta = np.arange(n) * TWO_PI / n
    d = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    rhs = a.eval(d)

    d2 = np.roll(d, -1, axis=0)
    r2 = np.roll(rhs, -1)
    det = d[:, 0] * d2[:, 1] - d[:, 1] * d2[:, 0]
    if np.any(np.abs(det) < 1e-15):
        raise DegenerateIntersection("consecutive support lines are parallel")
    x = (rhs * d2[:, 1] - r2 * d[:, 1]) / det
    y = (d[:, 0] * r2 - d2[:, 0] * rhs) / det
    verts = np.stack([x, y], axis=-1)
    # vertex k sits between support normals k and k+1
    mid = theta + math.pi / n
    normals = np.stack([np.cos(mid), np.sin(mid)], axis=-1)

    # drop duplicates created by support lines meeting at a common corner
    scale = float(np.max(np.abs(verts))) or 1.0
    keep = np.linalg.norm(verts - np.roll(verts, 1, axis=0),
                          axis=1) > 1e-12 * scale
    if keep.sum() < 3:
        raise DegenerateIntersection("polygon collapsed")
    verts, normals = verts[keep], normals[keep]

    e = np.roll(verts, -1, axis=0) - verts
    cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] \
        - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
    if np.any(cross < -1e-9 * scale * scale):
        raise DegenerateIntersection("input density is not convex")
    return WulffBoundary(verts, normals, 1.0, "halfplane_intersection")


def area(w) -> float:
    """Shoelace area of a closed boundary (or raw (n, 2) vertex array)."""
    v = w.vertices if isinstance(w, WulffBoundary) else np.asarray(w, float)
    if len(v) < 3:
        raise ValueError("area needs a closed polyline with >= 3 vertices")
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def aniso_perimeter(a: Anisotropy, curve, closed=True) -> float:
    """Anisotropic length: sum of phi(outward normal) * segment length.

    For a counter-clockwise curve the outward normal of the segment v - u
    is the tangent rotated by -90 degrees; by 1-homogeneity the sum equals
    sum phi((dy, -dx)).
    """
    pts = curve.vertices if isinstance(curve, WulffBoundary) \
        else np.asarray(curve, dtype=float)
    if len(pts) < 2:
        raise ValueError("perimeter needs at least two vertices")
    d = (np.roll(pts, -1, axis=0) - pts) if closed else np.diff(pts, axis=0)
    lengths = np.hypot(d[:, 0], d[:, 1])
    if np.any(lengths == 0.0):
        raise DuplicateVertex("curve has consecutive identical vertices")
    nrm = np.stack([d[:, 1], -d[:, 0]], axis=-1)
    return float(np.sum(a.eval(nrm)))


def scale_to_area(w: WulffBoundary, m: float) -> WulffBoundary:
    """Scale the boundary so the enclosed area equals m exactly."""
    if m <= 0:
        raise ValueError("target area must be positive")
    return w.scaled(math.sqrt(m / area(w)))


def _cross2(u, v):
    return u[0] * v[1] - u[1] * v[0]


def diameter(w) -> float:
    """Largest pairwise vertex distance, by rotating calipers."""
    v = w.vertices if isinstance(w, WulffBoundary) else np.asarray(w, float)
    hull = _convex_hull(v)
    n = len(hull)
    if n == 1:
        return 0.0
    if n == 2:
        return float(np.linalg.norm(hull[1] - hull[0]))
    best = 0.0
    j = 1
    for i in range(n):
        e = hull[(i + 1) % n] - hull[i]
        # advance the antipodal point while it still moves away from edge i
        while True:
            nxt = (j + 1) % n
            if _cross2(e, hull[nxt] - hull[j]) > 0:
                j = nxt
            else:
                break
        for k in (i, (i + 1) % n):
            best = max(best, float(np.linalg.norm(hull[j] - hull[k])))
    return best


def _convex_hull(points):
    """Monotone-chain convex hull, counter-clockwise without repetition."""
    pts = np.unique(np.asarray(points, dtype=float), axis=0)
    if len(pts) <= 2:
        return pts
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]

    def build(seq):
        out = []
        for p in seq:
            while len(out) > 1 and _cross2(out[-1] - out[-2],
                                           p - out[-2]) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = build(pts)
    upper = build(pts[::-1])
    return np.asarray(lower[:-1] + upper[:-1])


def dual_value(a: Anisotropy, x, n=4096) -> float:
    """phi*(x) = max over directions of x . nu / phi(nu).

    Sampled maximization on an angle grid, polished by golden-section
    search around the best sample.
    """
    x = np.asarray(x, dtype=float)
    theta = (np.arange(n) + 0.5) * TWO_PI / n
    d = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    vals = (d @ x) / a.eval(d)
    k = int(np.argmax(vals))

    def obj(t):
        nu = np.array([math.cos(t), math.sin(t)])
        return float(np.dot(x, nu)) / a.eval(nu)

    lo, hi = theta[k] - TWO_PI / n, theta[k] + TWO_PI / n
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = hi - invphi * (hi - lo)
    dd = lo + invphi * (hi - lo)
    fc, fd = obj(c), obj(dd)
    for _ in range(60):
        if fc > fd:
            hi, dd, fd = dd, c, fc
            c = hi - invphi * (hi - lo)
            fc = obj(c)
        else:
            lo, c, fc = c, dd, fd
            dd = lo + invphi * (hi - lo)
            fd = obj(dd)
    return max(float(vals[k]), fc, fd)


def hausdorff_distance(p, q) -> float:
    """Symmetric Hausdorff distance between two planar point sets."""
    from scipy.spatial import cKDTree

    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    d_pq = cKDTree(q).query(p)[0].max()
    d_qp = cKDTree(p).query(q)[0].max()
    return float(max(d_pq, d_qp))


def is_convex(vertices, tol=1e-12) -> bool:
    """True when all turns of the closed polyline are counter-clockwise."""
    v = np.asarray(vertices, dtype=float)
    e = np.roll(v, -1, axis=0) - v
    e2 = np.roll(e, -1, axis=0)
    cross = e[:, 0] * e2[:, 1] - e[:, 1] * e2[:, 0]
    scale = float(np.max(np.abs(v))) or 1.0
    return bool(np.all(cross >= -tol * scale * scale))
