"""Convergence of smoothed-l1 densities toward the crystalline limit.

For a decreasing sequence of smoothing parameters the sup-distance of
the density profiles, the Hausdorff distance of the Wulff shapes and
the gap between the corresponding lens/triod interfaces all shrink;
``approximation_chain`` tabulates them.
"""

import numpy as np

from .anisotropy import Direction, crystalline_l1, smoothed_l1, sup_gap
from .clusters import standard_lens_cluster, standard_triod_cluster
from .verify import hausdorff_gap
from .wulff import boundary_by_gradient_map, boundary_by_halfplane_intersection, hausdorff_distance


def _interface_points(cluster):
    return np.concatenate([np.asarray(i.points) for i in cluster.interfaces])


def _densify(vertices, per_edge=256):
    """Sample a closed polygon's edges so Hausdorff works on point sets."""
    v = np.asarray(vertices, dtype=float)
    t = np.linspace(0.0, 1.0, per_edge, endpoint=False)[:, None]
    nxt = np.roll(v, -1, axis=0)
    return ((1 - t[None]) * v[:, None] + t[None] * nxt[:, None]).reshape(-1, 2)


def approximation_chain(eps_list=(0.2, 0.1, 0.05), kind="lens", m=1.0,
                        R=10.0, n_hat=None, resolution=512, eps_ref=0.01):
    """Tabulate convergence of smoothed-l1 constructions as eps decreases.

    Returns a list of rows ``{eps, sup_gap, wulff_hausdorff,
    cluster_gap}`` where sup_gap compares the smoothed density to the
    crystalline l1 density on the unit circle, wulff_hausdorff compares
    the Wulff boundaries, and cluster_gap compares the lens/triod
    interfaces against the construction at the reference smoothing
    ``eps_ref``.
    """
    if n_hat is None:
        n_hat = Direction(np.pi / 2)
    l1 = crystalline_l1()
    square = _densify(boundary_by_halfplane_intersection(l1, 4).vertices)
    build = standard_lens_cluster if kind == "lens" else standard_triod_cluster
    ref = build(smoothed_l1(eps_ref), n_hat, m, R, resolution=resolution)
    ref_pts = _interface_points(ref)
    rows = []
    for eps in eps_list:
        a = smoothed_l1(eps)
        w = boundary_by_gradient_map(a, 1024)
        c = build(a, n_hat, m, R, resolution=resolution)
        rows.append({
            "eps": float(eps),
            "sup_gap": float(sup_gap(a, l1)),
            "wulff_hausdorff": float(
                hausdorff_distance(w.vertices, square)),
            "cluster_gap": float(
                hausdorff_gap(_interface_points(c), ref_pts)),
        })
    return rows


def gaps_decrease(rows, keys=("sup_gap", "wulff_hausdorff", "cluster_gap")):
    """True if every tabulated gap strictly decreases down the rows."""
    return all(rows[i][k] > rows[i + 1][k]
               for k in keys for i in range(len(rows) - 1))
