"""End-to-end acceptance checks, one per advertised guarantee.

Each test prints a single line ``criterion N: PASS/FAIL`` with the measured
quantities, then asserts.  Run with ``pytest -v -s tests/test_acceptance.py``
to see the lines immediately.
"""

import math
import time

import numpy as np
import pytest

import wulffclusters as wc
from wulffclusters.anisotropy import TWO_PI
from wulffclusters.approx import approximation_chain, gaps_decrease
from wulffclusters.clusters import (build_lens, build_triod,
                                    cluster_perimeter, perimeter_in_ball,
                                    standard_lens_cluster,
                                    standard_triod_cluster)
from wulffclusters.gridmin import grid_minimize
from wulffclusters.junctions import solve_young_pair, young_residual
from wulffclusters.verify import (DiscreteEnergyProblem, hausdorff_gap,
                                  minimize_fixed_topology,
                                  perturbation_test)
from wulffclusters.wulff import (aniso_perimeter,
                                 boundary_by_halfplane_intersection)

REGULAR = [wc.euclidean(), wc.elliptic(2, 1), wc.p_norm(4),
           wc.smoothed_l1(0.05)]


def report(n, ok, detail):
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} — {detail}")
    assert ok, f"criterion {n} failed: {detail}"


def shape_energy(a, shape):
    return sum(aniso_perimeter(a, arc, closed=False) for arc in shape.arcs)


def poly_area(p):
    x, y = p[:, 0], p[:, 1]
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def arc_step(c):
    return max(np.linalg.norm(np.diff(i.points, axis=0), axis=1).max()
               for i in c.interfaces)


def test_criterion_1_euclidean_recovery():
    t0 = time.perf_counter()
    a = wc.euclidean()
    worst_sep = 0.0
    for nd in (0.0, 33.0, 90.0, 141.0, 200.0, 270.0, 311.0):
        t = solve_young_pair(a, math.radians(nd))
        for nu in (t.nu1, t.nu2):
            d = abs((nu.theta - t.n_hat.theta + math.pi) % TWO_PI - math.pi)
            worst_sep = max(worst_sep, abs(math.degrees(d) - 120.0))
    # lens junction tangents: angles between the two arc tangents and the
    # flat interface direction at each junction
    c = standard_lens_cluster(a, 0.0, 1.0, 6.0, resolution=4096)
    worst_tan = 0.0
    for j, jct in enumerate(c.junctions):
        dirs = []
        for itf in c.interfaces:
            for end in (0, -1):
                p = itf.points[end]
                if np.linalg.norm(p - jct) <= 1e-9:
                    # Richardson-extrapolated tangent: a circular arc's
                    # chord to the k-th sample has angle theta0 + k*d/2,
                    # so 2*a1 - a2 recovers theta0 exactly
                    q1 = itf.points[1 if end == 0 else -2]
                    q2 = itf.points[2 if end == 0 else -3]
                    a1 = math.atan2(*(q1 - p)[::-1])
                    a2 = math.atan2(*(q2 - p)[::-1])
                    a2 = a1 + ((a2 - a1 + math.pi) % TWO_PI - math.pi)
                    dirs.append(2 * a1 - a2)
        assert len(dirs) == 3
        dirs = sorted(d % TWO_PI for d in dirs)
        gaps = [dirs[1] - dirs[0], dirs[2] - dirs[1],
                TWO_PI - (dirs[2] - dirs[0])]
        for g in gaps:
            worst_tan = max(worst_tan, abs(g - TWO_PI / 3))
    dt = time.perf_counter() - t0
    ok = worst_sep <= 1e-9 and worst_tan <= 1e-8 and dt < 1.0
    report(1, ok, f"normal separation err {worst_sep:.2e} deg, "
                  f"tangent err {worst_tan:.2e} rad, {dt:.2f}s")


def test_criterion_2_square_wulff_shape():
    t0 = time.perf_counter()
    w = boundary_by_halfplane_intersection(wc.crystalline_l1(), 4)
    v = np.asarray(sorted(map(tuple, w.vertices.tolist())))
    expect = np.asarray(sorted([(-1.0, -1.0), (-1.0, 1.0),
                                (1.0, -1.0), (1.0, 1.0)]))
    err = float(np.abs(v - expect).max())
    dt = time.perf_counter() - t0
    ok = err <= 1e-12 and dt < 0.1
    report(2, ok, f"vertex err {err:.2e}, {dt:.3f}s")


def test_criterion_3_young_residuals():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst = 0.0
    for a in REGULAR:
        for nd in rng.uniform(0.0, 360.0, 8):
            lens = build_lens(a, math.radians(nd), 1.0, resolution=64)
            triod = build_triod(a, math.radians(nd), 1.0, resolution=64)
            triples = [lens.triple, lens.triple] + list(triod.triples)
            for t in triples:
                worst = max(worst, young_residual(a, t.directions()))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-10 and dt < 5.0
    report(3, ok, f"max residual {worst:.2e}, {dt:.2f}s")


def test_criterion_4_mass_and_scaling():
    worst_area = 0.0
    worst_scale = 0.0
    for a in REGULAR:
        for builder in (build_lens, build_triod):
            s1 = builder(a, 0.4, 1.0, resolution=2048)
            s2 = builder(a, 0.4, 2.0, resolution=2048)
            worst_area = max(worst_area,
                             abs(poly_area(s1.polygon()) - 1.0),
                             abs(poly_area(s2.polygon()) - 2.0) / 2.0)
            e1, e2 = shape_energy(a, s1), shape_energy(a, s2)
            worst_scale = max(worst_scale,
                              abs(e2 / e1 - math.sqrt(2.0)) / math.sqrt(2.0))
    ok = worst_area <= 1e-8 and worst_scale <= 1e-8
    report(4, ok, f"area err {worst_area:.2e}, "
                  f"sqrt(2) scaling err {worst_scale:.2e}")


def test_criterion_5_fixed_topology_minimality():
    t0 = time.perf_counter()
    worst_rel = 0.0
    worst_beat = 0.0
    worst_gap_ratio = 0.0
    details = []
    for a in (wc.euclidean(), wc.elliptic(2, 1)):
        for maker in (standard_lens_cluster, standard_triod_cluster):
            R = 8.0
            c = maker(a, 0.0, 1.0, R, resolution=256)
            prob = DiscreteEnergyProblem(a, c)
            e_std = prob.energy(prob.coords0)
            # discretization scale: energy change under mesh refinement
            c2 = maker(a, 0.0, 1.0, R, resolution=512)
            p2 = DiscreteEnergyProblem(a, c2)
            disc = abs(e_std - p2.energy(p2.coords0))
            step = arc_step(c)
            for seed in range(8):
                opt, info = minimize_fixed_topology(prob, seed=seed,
                                                    tol=1e-8)
                e = info["energy"]
                worst_rel = max(worst_rel, abs(e - e_std) / e_std)
                beat = max(0.0, e_std - e)
                worst_beat = max(worst_beat, beat / (10.0 * disc))
                gap = hausdorff_gap(c, opt, modulo_translation=True)
                worst_gap_ratio = max(worst_gap_ratio, gap / (5.0 * step))
            details.append(f"{a.kind}/{c.kind}")
    dt = time.perf_counter() - t0
    ok = (worst_rel <= 1e-4 and worst_beat <= 1.0
          and worst_gap_ratio <= 1.0 and dt < 120.0)
    report(5, ok, f"energy rel err {worst_rel:.2e}, "
                  f"beat/(10 tol) {worst_beat:.2f}, "
                  f"gap/(5 step) {worst_gap_ratio:.2f}, {dt:.1f}s "
                  f"[{', '.join(details)}]")


def test_criterion_6_perturbation_suite():
    t0 = time.perf_counter()
    worst = 0.0
    for a in REGULAR:
        for maker in (standard_lens_cluster, standard_triod_cluster):
            c = maker(a, 0.0, 1.0, 8.0, resolution=128)
            r = perturbation_test(a, c, trials=500, seed=7)
            worst = min(worst, r["min_gap"])
    dt = time.perf_counter() - t0
    ok = worst >= -1e-9 and dt < 60.0
    report(6, ok, f"min energy gap {worst:.2e}, {dt:.1f}s")


def test_criterion_7_grid_minimization():
    t0 = time.perf_counter()
    m, R, W = 28.8, 12.0, 256
    rows = []
    ok = True
    for a in (wc.euclidean(), wc.smoothed_l1(0.05)):
        for kind in ("lens", "triod"):
            g = grid_minimize(a, kind, m, R, W, seed=0)
            comp = g.meta["e1_components"]
            isl = g.meta["islands"]
            sd = g.meta["symdiff"]
            ok = ok and comp == 1 and isl == 0 and sd <= 0.15 * m
            rows.append(f"{a.kind}/{kind}: comp={comp} isl={isl} "
                        f"sd/m={sd / m:.3f}")
    dt = time.perf_counter() - t0
    ok = ok and dt < 300.0
    report(7, ok, "; ".join(rows) + f", {dt:.0f}s")


def test_criterion_8_approximation_chain():
    t0 = time.perf_counter()
    ok = True
    rows = []
    for kind in ("lens", "triod"):
        table = approximation_chain(kind=kind)
        ok = ok and gaps_decrease(table)
        rows.append(f"{kind} sup-gaps "
                    + "/".join(f"{r['sup_gap']:.3f}" for r in table))
    dt = time.perf_counter() - t0
    ok = ok and dt < 60.0
    report(8, ok, "; ".join(rows) + f", {dt:.1f}s")


def test_criterion_9_linear_perimeter_bound():
    rng = np.random.default_rng(11)
    R = 8.0
    worst = 0.0
    for a in REGULAR:
        phi_max = a.phi_range()[1]
        for maker in (standard_lens_cluster, standard_triod_cluster):
            c = maker(a, 0.0, 1.0, R, resolution=1024)
            n_ifaces = len(c.interfaces)
            c0 = 8.0 * n_ifaces * phi_max
            for _ in range(32):
                x = rng.uniform(-R, R, 2)
                r = rng.uniform(1.0, R)
                p = perimeter_in_ball(a, c, x, r)
                worst = max(worst, p / (c0 * r))
    ok = worst <= 1.0
    report(9, ok, f"max P_phi(B_r)/(C0 r) = {worst:.3f}")


def test_criterion_10_half_sum_identity():
    worst = 0.0
    for a in REGULAR:
        for maker in (standard_lens_cluster, standard_triod_cluster):
            c = maker(a, 0.0, 1.0, 8.0, resolution=512)
            total, half, _ = cluster_perimeter(a, c, detail=True)
            worst = max(worst, abs(total - half))
    ok = worst <= 1e-9
    report(10, ok, f"max |interface-sum - half-chamber-sum| = {worst:.2e}")
