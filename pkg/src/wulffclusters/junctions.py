"""Anisotropic Young's law at triple junctions.

At a triple junction the three incident interface normals nu_i satisfy

    grad phi(nu_1) + grad phi(nu_2) + grad phi(nu_3) = 0,

i.e. the three gradient-map images sum to zero on the Wulff boundary.
Given one prescribed normal, the other two form a unique unordered pair
for a regular symmetric density; we find it by a damped Newton iteration
on the two free angles.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .anisotropy import TWO_PI, Anisotropy, Direction
from .errors import NoConvergence, NotRegular

RESIDUAL_TOL = 1e-10


@dataclass
class JunctionTriple:
    """A prescribed exterior normal with its Young pair of interface normals.

    A, B, C are the gradient-map images of n_hat, nu1, nu2 on the unit
    Wulff boundary; they sum to `residual` in norm.
    """

    n_hat: Direction
    nu1: Direction
    nu2: Direction
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    residual: float

    def directions(self):
        return self.n_hat, self.nu1, self.nu2

    def to_dict(self):
        return {"n_hat_deg": math.degrees(self.n_hat.theta),
                "nu1_deg": math.degrees(self.nu1.theta),
                "nu2_deg": math.degrees(self.nu2.theta),
                "residual": self.residual,
                "A": self.A.tolist(),
                "B": self.B.tolist(),
                "C": self.C.tolist()}

    def to_json(self):
        return json.dumps(self.to_dict())


def young_residual(a: Anisotropy, directions) -> float:
    """|sum of grad phi(nu_i)| over the three directions; 0 iff Young holds."""
    total = np.zeros(2)
    for d in directions:
        theta = d.theta if isinstance(d, Direction) else float(d)
        total += a.gradient_at_angle(theta)
    return float(np.linalg.norm(total))


def _make_triple(a, theta0, t1, t2):
    # deterministic ordering: nu1 is the solution counter-clockwise from n_hat
    o1 = (t1 - theta0) % TWO_PI
    o2 = (t2 - theta0) % TWO_PI
    if o1 > o2:
        t1, t2 = t2, t1
    n_hat, nu1, nu2 = Direction(theta0), Direction(t1), Direction(t2)
    A = a.gradient_at_angle(n_hat.theta)
    B = a.gradient_at_angle(nu1.theta)
    C = a.gradient_at_angle(nu2.theta)
    return JunctionTriple(n_hat, nu1, nu2, A, B, C,
                          float(np.linalg.norm(A + B + C)))


def _newton(a, theta0, t1, t2, max_iter=60):
    """Damped Newton on G(t1, t2) = F(t1) + F(t2) + F(theta0)."""
    g0 = a.gradient_at_angle(theta0)

    def G(u1, u2):
        return a.gradient_at_angle(u1) + a.gradient_at_angle(u2) + g0

    r = G(t1, t2)
    rn = np.linalg.norm(r)
    for _ in range(max_iter):
        if rn <= 1e-13:
            break
        # columns of the Jacobian: curvature times the unit tangent
        cols = []
        for t in (t1, t2):
            kappa = float(a.curvature(t))
            cols.append(kappa * np.array([-math.sin(t), math.cos(t)]))
        J = np.column_stack(cols)
        try:
            step = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError:
            return t1, t2, rn, False
        # backtracking keeps the iteration from overshooting flat spots
        lam = 1.0
        for _ in range(30):
            u1, u2 = t1 + lam * step[0], t2 + lam * step[1]
            r_new = G(u1, u2)
            rn_new = np.linalg.norm(r_new)
            if rn_new < rn:
                t1, t2, r, rn = u1, u2, r_new, rn_new
                break
            lam *= 0.5
        else:
            return t1, t2, rn, False
    return t1, t2, rn, rn <= RESIDUAL_TOL


def solve_young_pair(a: Anisotropy, n_hat) -> JunctionTriple:
    """The unique Young pair for a regular symmetric density.

    Seeds the Newton iteration with the Euclidean answer (n_hat +/- 120
    degrees) and falls back to a coarse grid of restarts.
    """
    if not (a.is_regular and a.is_symmetric):
        raise NotRegular("Young pair is defined for regular symmetric "
                         f"densities, not {a.kind}")
    if not isinstance(n_hat, Direction):
        n_hat = Direction(n_hat) if np.isscalar(n_hat) \
            else Direction.from_vector(n_hat)
    theta0 = n_hat.theta

    seeds = [(theta0 + TWO_PI / 3, theta0 - TWO_PI / 3)]
    # 32 restarts on a coarse offset grid, ordered around the Euclidean seed
    offsets = np.linspace(0.35 * math.pi, 0.95 * math.pi, 8)
    for d1 in offsets:
        for d2 in offsets[::2]:
            seeds.append((theta0 + d1, theta0 - d2))

    best = None
    for t1, t2 in seeds:
        r1, r2, rn, ok = _newton(a, theta0, t1, t2)
        sep = _min_separation(theta0, r1, r2)
        if ok and sep > 1e-6:
            return _make_triple(a, theta0, r1, r2)
        if best is None or rn < best[2]:
            best = (r1, r2, rn)
    raise NoConvergence(
        f"Young solver failed for {a.kind} at {n_hat!r} "
        f"(best residual {best[2]:.3g})",
        best=_make_triple(a, theta0, best[0], best[1]))


def _min_separation(*angles):
    sep = math.inf
    for i in range(len(angles)):
        for j in range(i + 1, len(angles)):
            d = abs((angles[i] - angles[j] + math.pi) % TWO_PI - math.pi)
            sep = min(sep, d)
    return sep


def triod_normals(a: Anisotropy, n_hat):
    """Young triples at the three vertices of the anisotropic triod.

    Returns (T_A, T_B, T_C): the triple for the prescribed normal and the
    triples for its two interface normals.  By uniqueness and the symmetry
    of phi, the interface normals of T_B and T_C are drawn from the same
    set {n_hat, nu1, nu2}.
    """
    t_a = solve_young_pair(a, n_hat)
    t_b = solve_young_pair(a, t_a.nu1)
    t_c = solve_young_pair(a, t_a.nu2)
    return t_a, t_b, t_c
