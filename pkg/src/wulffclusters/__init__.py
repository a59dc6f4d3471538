"""Anisotropic lens and triod clusters.

Construction of the standard anisotropic lens and triod clusters (Wulff
arcs joined at Young junctions, scaled to prescribed mass) and numerical
verification of their local perimeter minimality in a ball.
"""

from .anisotropy import (Anisotropy, Direction, ValidationReport,
                         crystalline_l1, custom_fourier, elliptic,
                         euclidean, p_norm, smooth_approximation,
                         smoothed_l1, sup_gap)
from .approx import approximation_chain, gaps_decrease
from .clusters import (Cluster, Interface, LensShape, TriodShape,
                       build_lens, build_triod, cluster_perimeter,
                       junction_residuals, perimeter_in_ball,
                       standard_lens_cluster, standard_triod_cluster)
from .errors import (ConstraintUnsatisfiable, DegenerateIntersection,
                     DimensionMismatch, DuplicateVertex, NoConvergence,
                     NotDifferentiable, NotRegular, RadiusTooSmall,
                     TopologyMismatch, UnsupportedKind, WulffClustersError,
                     ZeroVector)
from .gridmin import BACKEND as GRID_BACKEND
from .gridmin import GridPartition, grid_minimize
from .junctions import (JunctionTriple, solve_young_pair, triod_normals,
                        young_residual)
from .svg import cluster_svg, wulff_svg
from .verify import (DiscreteEnergyProblem, VerificationReport,
                     hausdorff_gap, minimize_fixed_topology,
                     perturbation_test, polyline_energy, verify_cluster)
from .wulff import (WulffBoundary, aniso_perimeter, area,
                    boundary_by_gradient_map,
                    boundary_by_halfplane_intersection, diameter,
                    dual_value, hausdorff_distance, scale_to_area)

__version__ = "0.1.0"
