"""Anisotropic lens / triod shapes and the standard clusters in B_R.

The lens is bounded by a Wulff arc and its central reflection, meeting at
two Young junctions; the triod (anisotropic Reuleaux triangle) by three
Wulff arcs meeting at three Young junctions.  The standard clusters join
the shape vertices to the boundary of the ball B_R by straight segments,
realizing the flat exterior configuration: two parallel half-lines for the
(1,2)-cluster, three Young half-lines for the (1,3)-cluster.

Orientation conventions: arcs are traversed counter-clockwise around the
finite chamber E1; for any interface polyline the per-segment normal is
the tangent rotated by -90 degrees and points out of chamber ``pair[0]``
into chamber ``pair[1]``.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .anisotropy import TWO_PI, Anisotropy, Direction
from .errors import RadiusTooSmall, TopologyMismatch
from .junctions import JunctionTriple, solve_young_pair, triod_normals
from .wulff import area as polygon_area
from .wulff import aniso_perimeter, boundary_by_gradient_map, diameter


def _rot_minus90(v):
    v = np.asarray(v, dtype=float)
    return np.stack([v[..., 1], -v[..., 0]], axis=-1)


def _arc_points(a, theta_from, span, k):
    """Gradient-map sample of a Wulff arc over a CCW normal-angle span."""
    theta = np.linspace(theta_from, theta_from + span, k + 1)
    return a.gradient_at_angle(theta)


def _arc_count(resolution, span):
    return max(16, int(round(resolution * span / TWO_PI)))


@dataclass
class LensShape:
    """The anisotropic lens, centered at the chord midpoint, area = m."""

    vertices: np.ndarray          # (2, 2): images of nu1 and nu2
    arcs: list                    # [lower, upper] polylines, CCW around E1
    lam: float
    triple: JunctionTriple
    m: float

    def polygon(self):
        return np.vstack([self.arcs[0][:-1], self.arcs[1][:-1]])

    def translated(self, delta):
        d = np.asarray(delta, dtype=float)
        return LensShape(self.vertices + d, [p + d for p in self.arcs],
                         self.lam, self.triple, self.m)


@dataclass
class TriodShape:
    """The anisotropic Reuleaux triangle, centroid at the origin, area = m."""

    vertices: np.ndarray          # (3, 2), ray normals n_hat, nu1, nu2
    arcs: list                    # [arc1, arc3, arc2] CCW chain around E1
    lam: float
    triples: tuple                # Young triples at the three vertices
    m: float

    def polygon(self):
        return np.vstack([p[:-1] for p in self.arcs])

    def translated(self, delta):
        d = np.asarray(delta, dtype=float)
        return TriodShape(self.vertices + d, [p + d for p in self.arcs],
                          self.lam, self.triples, self.m)


def build_lens(a: Anisotropy, n_hat, m: float, resolution=1024) -> LensShape:
    """Construct the anisotropic lens with prescribed normal and area.

    The Wulff arc between the Young points B and C avoiding A is joined
    to its central reflection (translated so the endpoints coincide), and
    the figure is scaled so the enclosed area equals m.
    """
    if m <= 0:
        raise ValueError("lens mass must be positive")
    triple = solve_young_pair(a, n_hat)
    t1, t2 = triple.nu1.theta, triple.nu2.theta
    span = (t2 - t1) % TWO_PI
    k = _arc_count(resolution, span)

    lower = _arc_points(a, t1, span, k)            # B -> C, avoiding A
    upper = (triple.B + triple.C) - lower          # C -> B after reflection
    center = 0.5 * (triple.B + triple.C)
    lower -= center
    upper -= center

    poly = np.vstack([lower[:-1], upper[:-1]])
    lam = math.sqrt(m / polygon_area(poly))
    verts = np.stack([triple.B - center, triple.C - center]) * lam
    return LensShape(verts, [lower * lam, upper * lam], lam, triple, m)


def build_triod(a: Anisotropy, n_hat, m: float, resolution=1024) -> TriodShape:
    """Construct the anisotropic Reuleaux triangle of area m.

    Three Wulff arcs (from the Young points to the reflections of their
    partners) are translated to meet end-to-end; Young's law guarantees
    the chain closes exactly up to the solver residual.
    """
    if m <= 0:
        raise ValueError("triod mass must be positive")
    t_a, t_b, t_c = triod_normals(a, n_hat)
    th0, th1, th2 = (t_a.n_hat.theta, t_a.nu1.theta, t_a.nu2.theta)

    spans = [((th2 - math.pi) - th0) % TWO_PI,     # arc1: A -> -C
             ((th0 + math.pi) - th1) % TWO_PI,     # arc3: B -> -A
             ((th1 + math.pi) - th2) % TWO_PI]     # arc2: C -> -B
    ks = [_arc_count(resolution, s) for s in spans]

    p1 = _arc_points(a, th0, spans[0], ks[0])
    p3 = _arc_points(a, th1, spans[1], ks[1])
    p2 = _arc_points(a, th2, spans[2], ks[2])
    p3 = p3 + (p1[-1] - p3[0])
    p2 = p2 + (p3[-1] - p2[0])

    poly = np.vstack([p1[:-1], p3[:-1], p2[:-1]])
    centroid = _polygon_centroid(poly)
    arcs = [p1 - centroid, p3 - centroid, p2 - centroid]
    lam = math.sqrt(m / polygon_area(poly))
    arcs = [p * lam for p in arcs]
    # vertices in ray-normal order n_hat, nu1, nu2
    verts = np.stack([arcs[0][-1], arcs[1][-1], arcs[2][-1]])
    return TriodShape(verts, arcs, lam, (t_a, t_b, t_c), m)


def _polygon_centroid(poly):
    x, y = poly[:, 0], poly[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    area6 = 3.0 * np.sum(cross)
    cx = np.sum((x + xn) * cross) / area6
    cy = np.sum((y + yn) * cross) / area6
    return np.array([cx, cy])


# ----------------------------------------------------------------------
# clusters


@dataclass
class Interface:
    pair: tuple                  # (i, j): normal points out of i into j
    points: np.ndarray
    kind: str                    # "arc" | "segment"

    def to_dict(self):
        return {"pair": list(self.pair), "kind": self.kind,
                "points": self.points.tolist()}


@dataclass
class Cluster:
    """A labeled planar partition of B_R with the prescribed exterior."""

    kind: str                    # "lens" | "triod"
    chambers: list               # [(label, finite), ...]
    interfaces: list
    junctions: np.ndarray
    anchors: np.ndarray
    R: float
    m: float
    shape: object
    n_hat: Direction

    def e1_polygon(self):
        return self.shape.polygon()

    def to_dict(self):
        return {"kind": self.kind,
                "chambers": [{"label": lbl, "finite": fin}
                             for lbl, fin in self.chambers],
                "interfaces": [i.to_dict() for i in self.interfaces],
                "junctions": self.junctions.tolist(),
                "anchors": self.anchors.tolist(),
                "R": self.R, "m": self.m,
                "n_hat_deg": math.degrees(self.n_hat.theta)}

    def to_json(self):
        return json.dumps(self.to_dict())


def _segment(p, q, interior):
    return np.linspace(p, q, interior + 2)


def _ray_anchor(v, d, R):
    """Intersection of the ray v + s d (s > 0) with the circle of radius R."""
    vd = float(np.dot(v, d))
    disc = vd * vd + R * R - float(np.dot(v, v))
    s = -vd + math.sqrt(disc)
    return v + s * d


def _check_radius(a, lam, m, R, resolution):
    wb = boundary_by_gradient_map(a, max(64, resolution))
    d = lam * diameter(wb)
    if R <= 2.0 * d:
        raise RadiusTooSmall(
            f"need R > 2 * diameter of the scaled Wulff shape ({2 * d:.4g})")


def standard_lens_cluster(a: Anisotropy, n_hat, m: float, R: float,
                          resolution=1024, seg_interior=16) -> Cluster:
    """The standard (1,2)-cluster: lens + two parallel half-lines.

    Chambers: E1 the lens, E2 the infinite chamber on the side n_hat points
    to, E3 the opposite one.  The two E(2,3) half-lines leave the junctions
    perpendicular to n_hat and end at anchors on the circle of radius R.
    """
    if not isinstance(n_hat, Direction):
        n_hat = Direction(n_hat) if np.isscalar(n_hat) \
            else Direction.from_vector(n_hat)
    shape = build_lens(a, n_hat, m, resolution)
    _check_radius(a, shape.lam, m, R, resolution)

    nv = n_hat.vec
    t_hat = np.array([nv[1], -nv[0]])
    order = np.argsort(shape.vertices @ t_hat)
    v_left, v_right = shape.vertices[order[0]], shape.vertices[order[1]]
    p_left = _ray_anchor(v_left, -t_hat, R)
    p_right = _ray_anchor(v_right, t_hat, R)

    # lower arc faces E3 (normal opposite to n_hat), upper faces E2
    interfaces = [
        Interface((1, 3), shape.arcs[0], "arc"),
        Interface((1, 2), shape.arcs[1], "arc"),
        # junction->anchor, -t_hat direction: -90 rotation gives +n_hat -> E2
        Interface((3, 2), _segment(v_left, p_left, seg_interior), "segment"),
        Interface((2, 3), _segment(v_right, p_right, seg_interior),
                  "segment"),
    ]
    return Cluster("lens", [(1, True), (2, False), (3, False)], interfaces,
                   np.stack([v_left, v_right]), np.stack([p_left, p_right]),
                   R, m, shape, n_hat)


def standard_triod_cluster(a: Anisotropy, n_hat, m: float, R: float,
                           resolution=1024, seg_interior=16) -> Cluster:
    """The standard (1,3)-cluster: triod + three Young half-lines.

    Chambers: E2 faces the first arc (between the rays with normals n_hat
    and nu2), E3 faces the second (n_hat / nu1), E4 the third (nu1 / nu2).
    """
    if not isinstance(n_hat, Direction):
        n_hat = Direction(n_hat) if np.isscalar(n_hat) \
            else Direction.from_vector(n_hat)
    shape = build_triod(a, n_hat, m, resolution)
    _check_radius(a, shape.lam, m, R, resolution)

    t_a = shape.triples[0]
    ray_normals = [t_a.n_hat.vec, t_a.nu1.vec, t_a.nu2.vec]
    anchors = []
    segments = []
    for v, nrm in zip(shape.vertices, ray_normals):
        d = np.array([nrm[1], -nrm[0]])
        if float(np.dot(v, d)) < 0.0:
            d = -d
        p = _ray_anchor(v, d, R)
        anchors.append(p)
        segments.append(_segment(v, p, seg_interior))

    # adjacent chambers across each ray, fixed by the arc ordering:
    # ray at vertex 0 (normal n_hat) separates E2 (arc1 side) and E3 (arc3)
    interfaces = [
        Interface((1, 2), shape.arcs[0], "arc"),
        Interface((1, 3), shape.arcs[1], "arc"),
        Interface((1, 4), shape.arcs[2], "arc"),
    ]
    ray_pairs = [(2, 3), (3, 4), (4, 2)]
    for seg, pair, nrm in zip(segments, ray_pairs, ray_normals):
        tangent = seg[-1] - seg[0]
        outward = _rot_minus90(tangent / np.linalg.norm(tangent))
        # orient the pair so the -90 normal points into pair[1]
        i, j = pair
        if float(np.dot(outward, nrm)) < 0.0:
            i, j = j, i
        interfaces.append(Interface((i, j), seg, "segment"))
    return Cluster("triod",
                   [(1, True), (2, False), (3, False), (4, False)],
                   interfaces, shape.vertices.copy(), np.stack(anchors),
                   R, m, shape, n_hat)


# ----------------------------------------------------------------------
# measurements


def cluster_perimeter(a: Anisotropy, c: Cluster, detail=False):
    """Anisotropic perimeter of the cluster in B_R.

    Each interface is counted once.  With ``detail=True`` also returns the
    half-sum of the chamber-wise perimeters and a consistency flag.
    """
    total = sum(aniso_perimeter(a, i.points, closed=False)
                for i in c.interfaces)
    if not detail:
        return total
    half_sum = 0.0
    for label, _ in c.chambers:
        for itf in c.interfaces:
            if label == itf.pair[0]:
                half_sum += aniso_perimeter(a, itf.points, closed=False)
            elif label == itf.pair[1]:
                half_sum += aniso_perimeter(a, itf.points[::-1], closed=False)
    half_sum *= 0.5
    return total, half_sum, abs(total - half_sum) <= 1e-9 * max(1.0, total)


def perimeter_in_ball(a: Anisotropy, c: Cluster, center, r: float) -> float:
    """Anisotropic perimeter of the cluster interfaces inside B_r(center)."""
    x = np.asarray(center, dtype=float)
    total = 0.0
    for itf in c.interfaces:
        p = itf.points[:-1] - x
        q = itf.points[1:] - x
        d = q - p
        # |p + t d|^2 = r^2 on t in [0, 1]
        aa = np.einsum("ij,ij->i", d, d)
        bb = 2.0 * np.einsum("ij,ij->i", p, d)
        cc = np.einsum("ij,ij->i", p, p) - r * r
        disc = bb * bb - 4.0 * aa * cc
        inside = disc > 0.0
        if not np.any(inside):
            continue
        sq = np.sqrt(np.maximum(disc, 0.0))
        t_lo = np.clip((-bb - sq) / (2.0 * aa), 0.0, 1.0)
        t_hi = np.clip((-bb + sq) / (2.0 * aa), 0.0, 1.0)
        frac = np.where(inside, t_hi - t_lo, 0.0)
        gamma = a.eval(_rot_minus90(d))
        total += float(np.sum(gamma * frac))
    return total


def junction_residuals(a: Anisotropy, c: Cluster):
    """Young residual at each junction from the incident interface tangents.

    For each junction the outgoing tangent of every incident interface is
    rotated by 90 degrees; the norm of the summed gradient-map images is
    the residual (zero iff the anisotropic Young's law holds there).
    """
    tol = 1e-9 * c.R
    residuals = []
    for v in c.junctions:
        total = np.zeros(2)
        hits = 0
        for itf in c.interfaces:
            pts = itf.points
            for end, nxt in ((pts[0], pts[1]), (pts[-1], pts[-2])):
                if np.linalg.norm(end - v) <= tol:
                    tang = nxt - end
                    normal = np.array([-tang[1], tang[0]])
                    total += a.gradient(normal)
                    hits += 1
        if hits != 3:
            raise TopologyMismatch(
                f"junction {v} has {hits} incident interface endpoints")
        residuals.append(float(np.linalg.norm(total)))
    return residuals


def translate_body(c: Cluster, delta) -> Cluster:
    """Translate E1 (arcs and junctions) while keeping the anchors fixed.

    The connecting segments are re-drawn from the moved junctions to the
    original anchors; along the neutral direction of the lens this leaves
    the perimeter invariant.
    """
    d = np.asarray(delta, dtype=float)
    shape = c.shape.translated(d)
    interfaces = []
    for itf in c.interfaces:
        if itf.kind == "arc":
            interfaces.append(Interface(itf.pair, itf.points + d, "arc"))
        else:
            interior = len(itf.points) - 2
            interfaces.append(Interface(
                itf.pair, _segment(itf.points[0] + d, itf.points[-1],
                                   interior), "segment"))
    return Cluster(c.kind, list(c.chambers), interfaces, c.junctions + d,
                   c.anchors.copy(), c.R, c.m, shape, c.n_hat)


def interfaces_cross(c: Cluster) -> bool:
    """True if any two interfaces intersect away from shared junctions."""
    from shapely.geometry import LineString

    lines = [LineString(i.points) for i in c.interfaces]
    eps = 1e-9 * c.R
    for i in range(len(lines)):
        for j in range(i + 1, len(lines)):
            inter = lines[i].intersection(lines[j])
            if inter.is_empty:
                continue
            if inter.geom_type == "Point":
                pts = [inter]
            elif inter.geom_type == "MultiPoint":
                pts = list(inter.geoms)
            else:
                return True
            for pt in pts:
                p = np.array([pt.x, pt.y])
                near_junction = any(
                    np.linalg.norm(p - v) <= 10 * eps for v in c.junctions)
                if not near_junction:
                    return True
    return False
