"""Numerical verification of local minimality for the standard clusters.

Two independent checks are provided:

* a fixed-topology descent: the interface polylines (with shared junction
  vertices and pinned anchors) are relaxed under the anisotropic energy
  with the chamber areas constrained, via an augmented Lagrangian with an
  L-BFGS-B inner solver; the optimum is compared with the standard cluster
  both in energy and in Hausdorff distance modulo neutral translations;

* a perturbation sweep: many random area-preserving normal perturbations
  of the interfaces are generated and none may decrease the energy.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize, brentq
from scipy.spatial import cKDTree

from .anisotropy import Anisotropy
from .clusters import Cluster, Interface, cluster_perimeter, \
    junction_residuals, translate_body
from .errors import DimensionMismatch, NoConvergence, TopologyMismatch
from .junctions import young_residual
from .wulff import aniso_perimeter


def polyline_energy(a: Anisotropy, points) -> float:
    """Anisotropic length of an open polyline."""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != 2:
        raise DimensionMismatch(f"expected (n, 2) points, got {points.shape}")
    return aniso_perimeter(a, points, closed=False)


# ----------------------------------------------------------------------
# flattening a cluster into a free-vertex optimization problem


class DiscreteEnergyProblem:
    """Flattens a cluster's interfaces into one free-vertex coordinate set.

    Junctions are shared vertices, anchors are pinned; every other
    interface vertex moves freely.  Exposes the total anisotropic energy,
    the finite-chamber areas, and their analytic gradients with respect
    to the free coordinates.
    """

    def __init__(self, a: Anisotropy, cluster: Cluster):
        self.a = a
        self.cluster = cluster
        tol = 1e-9 * cluster.R

        coords = []           # list of (2,) vertex positions
        fixed = []            # bool per vertex
        index_of_junction = {}
        for k, v in enumerate(cluster.junctions):
            index_of_junction[k] = len(coords)
            coords.append(np.array(v, dtype=float))
            fixed.append(False)

        self.edges = []       # (i, j) vertex index pairs, per interface
        self.iface_vertex_ids = []
        for itf in cluster.interfaces:
            ids = []
            for p in itf.points:
                jid = None
                for k, v in enumerate(cluster.junctions):
                    if np.linalg.norm(p - v) <= tol:
                        jid = index_of_junction[k]
                        break
                if jid is None:
                    jid = len(coords)
                    coords.append(np.array(p, dtype=float))
                    is_anchor = any(np.linalg.norm(p - q) <= tol
                                    for q in cluster.anchors)
                    fixed.append(is_anchor)
                ids.append(jid)
            self.iface_vertex_ids.append(ids)
            self.edges.extend(zip(ids[:-1], ids[1:]))

        self.coords0 = np.array(coords)
        self.fixed = np.array(fixed)
        self.free_ids = np.where(~self.fixed)[0]
        self._pos_of_free = {v: k for k, v in enumerate(self.free_ids)}
        self.edges = np.array(self.edges)

        # finite chamber boundary loops (vertex id cycles, CCW)
        self.area_loops = []
        for label, finite in cluster.chambers:
            if not finite:
                continue
            loop = self._chamber_loop(label)
            self.area_loops.append((label, loop))
        self.target_areas = np.array(
            [self._loop_area(self.coords0, loop)
             for _, loop in self.area_loops])

    def _chamber_loop(self, label):
        """Chain the interfaces bounding a finite chamber into a CCW cycle."""
        pieces = []
        for itf, ids in zip(self.cluster.interfaces, self.iface_vertex_ids):
            if itf.pair[0] == label:
                pieces.append(list(ids))
            elif itf.pair[1] == label:
                pieces.append(list(ids[::-1]))
        loop = pieces.pop(0)
        while pieces:
            for k, p in enumerate(pieces):
                if p[0] == loop[-1]:
                    loop.extend(p[1:])
                    pieces.pop(k)
                    break
            else:
                raise TopologyMismatch(
                    f"chamber {label} boundary does not chain into a loop")
        if loop[0] != loop[-1]:
            raise TopologyMismatch(f"chamber {label} boundary is not closed")
        return np.array(loop[:-1])

    @staticmethod
    def _loop_area(coords, loop):
        p = coords[loop]
        q = coords[np.roll(loop, -1)]
        return 0.5 * float(np.sum(p[:, 0] * q[:, 1] - q[:, 0] * p[:, 1]))

    # -- packing --------------------------------------------------------

    def pack(self, coords):
        return coords[self.free_ids].ravel()

    def unpack(self, x):
        coords = self.coords0.copy()
        coords[self.free_ids] = x.reshape(-1, 2)
        return coords

    # -- energy, areas, gradients ----------------------------------------

    def energy(self, coords):
        d = coords[self.edges[:, 1]] - coords[self.edges[:, 0]]
        normals = np.stack([d[:, 1], -d[:, 0]], axis=-1)
        return float(np.sum(self.a.eval(normals)))

    def energy_grad(self, coords):
        d = coords[self.edges[:, 1]] - coords[self.edges[:, 0]]
        normals = np.stack([d[:, 1], -d[:, 0]], axis=-1)
        g = self.a.gradient(normals)          # d phi / d normal
        # normal = R(-90) d  =>  d E / d(d) = R(-90)^T g = R(+90) g
        gd = np.stack([-g[:, 1], g[:, 0]], axis=-1)
        grad = np.zeros_like(coords)
        np.add.at(grad, self.edges[:, 1], gd)
        np.add.at(grad, self.edges[:, 0], -gd)
        return grad

    def areas(self, coords):
        return np.array([self._loop_area(coords, loop)
                         for _, loop in self.area_loops])

    def area_grads(self, coords):
        grads = []
        for _, loop in self.area_loops:
            g = np.zeros_like(coords)
            prv = coords[np.roll(loop, 1)]
            nxt = coords[np.roll(loop, -1)]
            g[loop, 0] = 0.5 * (nxt[:, 1] - prv[:, 1])
            g[loop, 1] = 0.5 * (prv[:, 0] - nxt[:, 0])
            grads.append(g)
        return grads

    def rebuild_cluster(self, coords):
        c = self.cluster
        interfaces = [Interface(itf.pair, coords[ids].copy(), itf.kind)
                      for itf, ids in zip(c.interfaces,
                                          self.iface_vertex_ids)]
        junctions = coords[:len(c.junctions)].copy()
        return Cluster(c.kind, list(c.chambers), interfaces, junctions,
                       c.anchors.copy(), c.R, c.m, c.shape, c.n_hat)


def minimize_fixed_topology(p, init=None, tol=1e-10, max_outer=40,
                            mu0=10.0, seed=None):
    """Constrained descent of the cluster energy at fixed topology.

    ``p`` is a DiscreteEnergyProblem (or an (anisotropy, cluster) pair);
    ``init`` optionally overrides the starting free coordinates.
    Augmented Lagrangian on the chamber-area constraints with L-BFGS-B
    inner solves.  Returns (optimized_cluster, info dict).  Raises
    NoConvergence (carrying the best iterate) if the area constraints
    cannot be met to the requested tolerance.
    """
    if isinstance(p, DiscreteEnergyProblem):
        prob = p
    else:
        prob = DiscreteEnergyProblem(*p)
    cluster = prob.cluster
    x = prob.pack(prob.coords0) if init is None else np.asarray(
        init, dtype=float).ravel().copy()
    if x.size != 2 * len(prob.free_ids):
        raise DimensionMismatch(
            f"init has {x.size} coordinates, expected "
            f"{2 * len(prob.free_ids)}")
    if seed is not None:
        rng = np.random.default_rng(seed)
        scale = 1e-3 * cluster.shape.lam
        x = x + rng.normal(0.0, scale, size=x.shape)

    lam_mult = np.zeros(len(prob.target_areas))
    mu = mu0
    scale_E = max(1.0, prob.energy(prob.coords0))

    def objective(xf):
        coords = prob.unpack(xf)
        viol = prob.areas(coords) - prob.target_areas
        val = prob.energy(coords) + float(lam_mult @ viol) \
            + 0.5 * mu * float(viol @ viol)
        g = prob.energy_grad(coords)
        for gi, li, vi in zip(prob.area_grads(coords), lam_mult, viol):
            g = g + (li + mu * vi) * gi
        return val, g[prob.free_ids].ravel()

    prev_viol = np.inf
    for outer in range(max_outer):
        res = minimize(objective, x, jac=True, method="L-BFGS-B",
                       options={"maxiter": 2000, "ftol": 1e-15,
                                "gtol": 1e-12})
        x = res.x
        coords = prob.unpack(x)
        viol = prob.areas(coords) - prob.target_areas
        vnorm = float(np.max(np.abs(viol)))
        lam_mult = lam_mult + mu * viol
        if vnorm <= tol * max(1.0, float(np.max(prob.target_areas))):
            break
        if vnorm > 0.5 * prev_viol:
            mu *= 10.0
        prev_viol = vnorm
    else:
        best = prob.rebuild_cluster(prob.unpack(x))
        err = NoConvergence(
            f"area violation {vnorm:.3e} after {max_outer} outer iterations")
        err.best = best
        raise err

    out = prob.rebuild_cluster(coords)
    info = {"energy": prob.energy(coords),
            "energy_initial": prob.energy(prob.coords0),
            "area_violation": vnorm,
            "outer_iterations": outer + 1,
            "mu_final": mu}
    return out, info


# ----------------------------------------------------------------------
# perturbation sweep


def _smooth_field(rng, n, modes=6):
    """A random smooth scalar profile on n points, sup-norm 1."""
    t = np.linspace(0.0, 1.0, n)
    f = np.zeros(n)
    for k in range(1, modes + 1):
        f += rng.normal() * np.sin(math.pi * k * t) / k
    s = np.max(np.abs(f))
    return f / s if s > 0 else f


def perturbation_test(a: Anisotropy, cluster: Cluster, trials=500,
                      amplitude=0.02, seed=0, tol=1e-9):
    """Random area-preserving perturbations must not decrease the energy.

    Each trial displaces the interior vertices of every interface by a
    random smooth normal field (vanishing at junctions and anchors), then
    restores the finite-chamber areas exactly by scaling the perturbation
    of the chamber boundary with a one-dimensional root solve.  Returns a
    dict with the minimum energy gap over all trials.
    """
    prob = DiscreteEnergyProblem(a, cluster)
    rng = np.random.default_rng(seed)
    e0 = prob.energy(prob.coords0)
    amp = amplitude * cluster.shape.lam

    # per-interface unit normals at interior vertices
    fields = []
    for ids in prob.iface_vertex_ids:
        pts = prob.coords0[ids]
        tang = np.zeros_like(pts)
        tang[1:-1] = pts[2:] - pts[:-2]
        nrm = np.stack([tang[:, 1], -tang[:, 0]], axis=-1)
        ln = np.linalg.norm(nrm, axis=1, keepdims=True)
        ln[ln == 0] = 1.0
        fields.append(nrm / ln)

    gaps = np.empty(trials)
    for trial in range(trials):
        disp = np.zeros_like(prob.coords0)
        if trial > 0:
            for ids, nrm in zip(prob.iface_vertex_ids, fields):
                prof = _smooth_field(rng, len(ids))
                prof[0] = prof[-1] = 0.0
                disp[ids] += (amp * prof)[:, None] * nrm
            disp[prob.fixed] = 0.0
            disp[:len(cluster.junctions)] = 0.0

        def area_err(s):
            coords = prob.coords0 + s * disp
            return float(np.max(np.abs(prob.areas(coords)
                                       - prob.target_areas)))

        def signed_err(s):
            coords = prob.coords0 + s * disp
            return float((prob.areas(coords) - prob.target_areas)[0])

        s = 1.0
        if trial > 0 and area_err(1.0) > 1e-14:
            # rescale the whole displacement to restore the (single) area
            lo, hi = 0.0, 1.0
            f_lo, f_hi = signed_err(lo), signed_err(hi)
            if f_lo * f_hi > 0:
                # same sign: shrink instead until the violation is tiny
                s = 1.0
                while area_err(s) > 1e-13 and s > 1e-8:
                    s *= 0.5
            else:
                s = brentq(signed_err, lo, hi, xtol=1e-15)
        coords = prob.coords0 + s * disp
        gaps[trial] = prob.energy(coords) - e0

    return {"trials": trials,
            "min_gap": float(np.min(gaps)),
            "zero_gap": float(gaps[0]),
            "passed": bool(np.min(gaps) >= -tol)}


# ----------------------------------------------------------------------
# distance between clusters and the verification report


def _interface_points(c):
    if isinstance(c, Cluster):
        return np.vstack([i.points for i in c.interfaces])
    pts = np.asarray(c, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise TopologyMismatch(f"expected a cluster or (n, 2) polyline, "
                               f"got shape {pts.shape}")
    return pts


def hausdorff_gap(c1, c2, modulo_translation=False):
    """Symmetric Hausdorff distance between two interface sets.

    Accepts clusters or bare polylines.  With ``modulo_translation`` the
    distance is minimized over planar translations of c2 (Nelder-Mead on
    the two shift components).
    """
    if isinstance(c1, Cluster) and isinstance(c2, Cluster):
        if c1.kind != c2.kind or len(c1.interfaces) != len(c2.interfaces):
            raise TopologyMismatch("clusters have different topologies")
    p1 = _interface_points(c1)
    p2 = _interface_points(c2)
    t1 = cKDTree(p1)

    def dist(shift):
        q = p2 + shift
        d_a = cKDTree(q).query(p1)[0].max()
        d_b = t1.query(q)[0].max()
        return max(d_a, d_b)

    if not modulo_translation:
        return dist(np.zeros(2))
    res = minimize(lambda s: dist(s), [0.0, 0.0], method="Nelder-Mead",
                   options={"xatol": 1e-12, "fatol": 1e-14})
    return float(min(res.fun, dist(np.zeros(2))))


@dataclass
class VerificationReport:
    config: dict
    energy_standard: float
    energy_found: float
    hausdorff_gap: float
    young_residuals: list
    perturbation: dict
    consistency_half_sum: bool
    crossings: bool
    passed: bool

    def to_dict(self):
        return {"config": self.config,
                "energy_standard": self.energy_standard,
                "energy_found": self.energy_found,
                "hausdorff_gap": self.hausdorff_gap,
                "young_residuals": self.young_residuals,
                "perturbation": self.perturbation,
                "consistency_half_sum": self.consistency_half_sum,
                "crossings": self.crossings,
                "passed": self.passed}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def verify_cluster(a: Anisotropy, cluster: Cluster, n_perturbations=500,
                   seed=0, energy_rtol=1e-4, descent_tol=1e-5,
                   pert_tol=1e-9):
    """Full verification of a standard cluster: descent + perturbations.

    The descent must not find anything better than the standard cluster
    beyond the discretization tolerance; no random area-preserving
    perturbation may decrease the energy.
    """
    e_std = cluster_perimeter(a, cluster)
    tot, half, half_ok = cluster_perimeter(a, cluster, detail=True)
    opt, info = minimize_fixed_topology((a, cluster))
    e_found = info["energy"]
    gap = hausdorff_gap(cluster, opt, modulo_translation=True)

    # tight Young residuals from the constructed normal triples
    if cluster.kind == "lens":
        triples = [cluster.shape.triple, cluster.shape.triple]
    else:
        triples = list(cluster.shape.triples)
    residuals = [young_residual(a, (t.n_hat, t.nu1, t.nu2)) for t in triples]

    pert = perturbation_test(a, cluster, trials=n_perturbations, seed=seed,
                             tol=pert_tol)

    from .clusters import interfaces_cross
    crossing = interfaces_cross(cluster)
    not_beaten = e_found >= e_std - descent_tol * max(1.0, e_std)
    close = abs(e_found - e_std) <= energy_rtol * e_std
    passed = (not_beaten and close and pert["passed"] and half_ok
              and not crossing and max(residuals) <= 1e-10)

    config = {"kind": cluster.kind, "aniso": a.to_dict(),
              "m": cluster.m, "R": cluster.R,
              "n_hat_deg": math.degrees(cluster.n_hat.theta),
              "n_perturbations": n_perturbations, "seed": seed}
    return VerificationReport(config, e_std, e_found, gap, residuals,
                              pert, half_ok, crossing, passed)
