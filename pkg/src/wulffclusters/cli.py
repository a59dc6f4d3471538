"""Command-line interface: construct, verify, and export clusters.

Subcommands: wulff | lens | triod | verify | approx.  Anisotropies are
given as ``name[:p1,p2]`` (euclidean, elliptic:a,b, p_norm:p, l1,
smoothed_l1:eps) or as a path to a JSON file for custom densities.
Outputs are deterministic: identical configuration and seed produce
byte-identical JSON.
"""

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import gridmin
from .anisotropy import (Anisotropy, Direction, crystalline_l1, elliptic,
                         euclidean, p_norm, smooth_approximation, smoothed_l1)
from .approx import approximation_chain, gaps_decrease
from .clusters import (cluster_perimeter, standard_lens_cluster,
                       standard_triod_cluster)
from .errors import WulffClustersError
from .junctions import young_residual
from .svg import cluster_svg, wulff_svg
from .verify import verify_cluster
from .wulff import (aniso_perimeter, area, boundary_by_gradient_map,
                    boundary_by_halfplane_intersection, diameter)


class BadConfig(Exception):
    """Invalid command-line configuration (exit code 2)."""


@dataclass
class RunConfig:
    subcommand: str
    aniso: Anisotropy
    n_hat: Direction
    m: float = 1.0
    R: float = 10.0
    resolution: int = 1024
    seed: int = 0
    seeds: int = 1
    out: str = None
    svg: str = None
    tol: float = 1e-9
    grid: int = 0
    kind: str = None
    extra: dict = field(default_factory=dict)


_FAMILIES = {
    "euclidean": (euclidean, 0),
    "elliptic": (elliptic, 2),
    "p_norm": (p_norm, 1),
    "l1": (crystalline_l1, 0),
    "crystalline_l1": (crystalline_l1, 0),
    "smoothed_l1": (smoothed_l1, 1),
}


def parse_aniso(spec):
    """Parse ``name[:p1,p2]`` or a JSON file path into an Anisotropy."""
    if spec.endswith(".json") or os.path.isfile(spec):
        try:
            with open(spec) as f:
                return Anisotropy.from_dict(json.load(f))
        except (OSError, ValueError, KeyError, WulffClustersError) as e:
            raise BadConfig(f"cannot load anisotropy from {spec}: {e}")
    name, _, rest = spec.partition(":")
    if name not in _FAMILIES:
        raise BadConfig(
            f"unknown anisotropy '{name}' (expected one of "
            f"{', '.join(sorted(_FAMILIES))}, or a JSON file path)")
    fn, nparams = _FAMILIES[name]
    try:
        params = [float(p) for p in rest.split(",") if p.strip()]
    except ValueError:
        raise BadConfig(f"bad parameters in anisotropy spec '{spec}'")
    if len(params) != nparams:
        raise BadConfig(f"anisotropy '{name}' takes {nparams} "
                        f"parameter(s), got {len(params)}")
    try:
        return fn(*params)
    except WulffClustersError as e:
        raise BadConfig(str(e))


def _build_parser():
    p = argparse.ArgumentParser(
        prog="wulffclusters",
        description="Anisotropic lens/triod clusters: construction, "
                    "local-minimality verification, and export.")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp, kind_arg=False):
        if kind_arg:
            sp.add_argument("kind", choices=["lens", "triod"])
        sp.add_argument("--aniso", default="euclidean",
                        help="name[:p1,p2] or JSON file")
        sp.add_argument("--nhat-deg", type=float, default=90.0,
                        help="exterior normal angle in degrees")
        sp.add_argument("--m", type=float, default=1.0)
        sp.add_argument("--R", type=float, default=10.0)
        sp.add_argument("--res", type=int, default=1024)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", help="JSON output path (default: stdout)")
        sp.add_argument("--svg", help="SVG output path")
        sp.add_argument("--tol", type=float, default=1e-9)
        sp.add_argument("--smooth", type=float, default=None,
                        help="replace a non-regular anisotropy by its "
                             "smoothing with this epsilon")

    common(sub.add_parser("wulff", help="Wulff shape of an anisotropy"))
    common(sub.add_parser("lens", help="standard lens cluster"))
    common(sub.add_parser("triod", help="standard triod cluster"))
    vp = sub.add_parser("verify", help="verify local minimality")
    common(vp, kind_arg=True)
    vp.add_argument("--seeds", type=int, default=1,
                    help="number of perturbation seeds to run")
    vp.add_argument("--grid", type=int, default=0,
                    help="also run the grid check at this width")
    ap = sub.add_parser("approx", help="smoothed-l1 convergence table")
    common(ap, kind_arg=True)
    return p


def _config(args):
    if args.m <= 0:
        raise BadConfig("--m must be positive")
    if args.R <= 0:
        raise BadConfig("--R must be positive")
    if args.res < 64:
        raise BadConfig("--res must be at least 64")
    if args.tol < 0:
        raise BadConfig("--tol must be nonnegative")
    smooth = getattr(args, "smooth", None)
    if smooth is not None and not 0 < smooth <= 1:
        raise BadConfig("--smooth must be in (0, 1]")
    a = parse_aniso(args.aniso)
    if smooth is not None:
        a = smooth_approximation(a, smooth)
    deg = args.nhat_deg % 360.0
    grid = getattr(args, "grid", 0)
    if grid and not 64 <= grid <= 512:
        raise BadConfig("--grid must be in [64, 512]")
    return RunConfig(subcommand=args.subcommand, aniso=a,
                     n_hat=Direction(math.radians(deg)), m=args.m,
                     R=args.R, resolution=args.res, seed=args.seed,
                     seeds=getattr(args, "seeds", 1), out=args.out,
                     svg=args.svg, tol=args.tol, grid=grid,
                     kind=getattr(args, "kind", None))


def _emit(cfg, payload):
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if cfg.out:
        with open(cfg.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _require_regular(cfg):
    if not cfg.aniso.is_regular:
        raise BadConfig(
            f"anisotropy '{cfg.aniso.kind}' is not regular; the junction "
            f"construction needs a smooth uniformly convex density -- "
            f"pass --smooth EPS to use its smoothed approximation")


def cmd_wulff(cfg):
    if cfg.aniso.is_regular:
        b = boundary_by_gradient_map(cfg.aniso, cfg.resolution)
    else:
        b = boundary_by_halfplane_intersection(cfg.aniso, cfg.resolution)
    ar = area(b)
    per = aniso_perimeter(cfg.aniso, b.vertices)
    dia = diameter(b)
    print(f"area      {ar:.12g}")
    print(f"perimeter {per:.12g}")
    print(f"diameter  {dia:.12g}")
    _emit(cfg, b.to_dict())
    if cfg.svg:
        wulff_svg(b, cfg.svg)
    return 0


def _build_cluster(cfg, kind):
    _require_regular(cfg)
    build = standard_lens_cluster if kind == "lens" else standard_triod_cluster
    return build(cfg.aniso, cfg.n_hat, cfg.m, cfg.R,
                 resolution=cfg.resolution)


def cmd_cluster(cfg, kind):
    c = _build_cluster(cfg, kind)
    energy = cluster_perimeter(cfg.aniso, c)
    if kind == "lens":
        triples = [c.shape.triple, c.shape.triple]
    else:
        triples = list(c.shape.triples)
    residuals = [young_residual(cfg.aniso, (t.n_hat, t.nu1, t.nu2))
                 for t in triples]
    print(f"energy {energy:.12g}")
    for k, r in enumerate(residuals):
        print(f"junction {k}: young residual {r:.3e}")
    _emit(cfg, c.to_dict())
    if cfg.svg:
        cluster_svg(c, cfg.svg)
    return 0


def _workers():
    env = os.environ.get("WULFF_CLUSTERS_THREADS", "")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        return 1


def cmd_verify(cfg):
    c = _build_cluster(cfg, cfg.kind)
    seeds = [cfg.seed + k for k in range(cfg.seeds)]

    def run(seed):
        return verify_cluster(cfg.aniso, c, seed=seed, pert_tol=cfg.tol)

    if _workers() > 1 and len(seeds) > 1:
        with ThreadPoolExecutor(max_workers=_workers()) as ex:
            reports = list(ex.map(run, seeds))  # merged in seed order
    else:
        reports = [run(s) for s in seeds]
    payload = {"kind": cfg.kind, "aniso": cfg.aniso.to_dict(),
               "reports": [r.to_dict() for r in reports]}
    passed = all(r.passed for r in reports)

    if cfg.grid:
        part = gridmin.grid_minimize(cfg.aniso, cfg.kind, cfg.m, cfg.R,
                                     cfg.grid, seed=cfg.seed)
        meta = part.meta
        # the symmetric-difference bound is part of the contract only at
        # grid widths >= 256; coarser grids check connectivity alone
        grid_ok = (meta["e1_components"] == 1 and meta["islands"] == 0
                   and (cfg.grid < 256 or meta["symdiff"] <= 0.15 * cfg.m))
        payload["grid"] = {"W": cfg.grid, "energy": meta["energy"],
                           "e1_components": meta["e1_components"],
                           "islands_found": meta["islands"],
                           "symdiff": meta["symdiff"],
                           "symdiff_limit": (0.15 * cfg.m if cfg.grid >= 256
                                             else None),
                           "passed": grid_ok}
        passed = passed and grid_ok
    payload["passed"] = passed
    for k, r in enumerate(reports):
        print(f"seed {seeds[k]}: {'pass' if r.passed else 'FAIL'} "
              f"(energy gap {r.energy_found - r.energy_standard:+.3e}, "
              f"min perturbation gap {r.perturbation['min_gap']:+.3e})")
    if cfg.grid:
        g = payload["grid"]
        lim = (f", symdiff {g['symdiff']:.4g} <= {g['symdiff_limit']:.4g}"
               if g["symdiff_limit"] is not None
               else f", symdiff {g['symdiff']:.4g}")
        print(f"grid W={g['W']}: {'pass' if g['passed'] else 'FAIL'} "
              f"(components {g['e1_components']}, islands "
              f"{g['islands_found']}{lim})")
    _emit(cfg, payload)
    return 0 if passed else 1


def cmd_approx(cfg):
    rows = approximation_chain(kind=cfg.kind, m=cfg.m, R=cfg.R,
                               n_hat=cfg.n_hat,
                               resolution=min(cfg.resolution, 512))
    monotone = gaps_decrease(rows)
    print(f"{'eps':>6} {'sup_gap':>12} {'wulff_hausdorff':>16} "
          f"{'cluster_gap':>12}")
    for r in rows:
        print(f"{r['eps']:>6.3g} {r['sup_gap']:>12.6g} "
              f"{r['wulff_hausdorff']:>16.6g} {r['cluster_gap']:>12.6g}")
    print(f"monotone decrease: {monotone}")
    _emit(cfg, {"kind": cfg.kind, "rows": rows, "monotone": monotone})
    return 0 if monotone else 1


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        if cfg.subcommand == "wulff":
            return cmd_wulff(cfg)
        if cfg.subcommand in ("lens", "triod"):
            return cmd_cluster(cfg, cfg.subcommand)
        if cfg.subcommand == "verify":
            return cmd_verify(cfg)
        if cfg.subcommand == "approx":
            return cmd_approx(cfg)
        raise BadConfig(f"unknown subcommand {cfg.subcommand}")
    except BadConfig as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except WulffClustersError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
