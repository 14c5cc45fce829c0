"""Flat cone surfaces glued from slit planes.

Samplers for the Poisson translation plane (the random simply connected
surface grown by recursively gluing slit planes at Poisson points) and for
square-tiled surfaces, a geodesic engine over either (tracing, visibility,
exact-area atlases, cone-point shortest paths, injectivity radii), and a
Monte Carlo harness validating the closed-form local laws.
"""

from .errors import (BudgetOverflow, DegenerateGeometry, DepthExceeded,
                     Disconnected, InsufficientData, NeedsExpansion, NoPath,
                     OutOfDomain, OutOfRange, PermParseError, SlitplaneError,
                     TooFewSamples, ZeroVector)
from .geom import (EPS_GEO, AngularInterval, Ray, Segment, Vec2, angle_of,
                   intersect_segment_ray)
from .flatcomplex import (ConePoint, Incidence, LocatedPoint, Portal,
                          PortalView, SurfaceProvider, develop, develop_along,
                          validate)
from .plane import (PLANTED_INDEX, PlaneNode, TruncatedPlane, expand,
                    manual_plane, poisson_disk, rescale_plane, restrict,
                    sample_plane)
from .origami import (Perm, SquareTiledSurface, build_sts, parse_cycles,
                      print_cycles, random_sts, rescale)
from .cover import UniversalCover
from .explorer import (AtlasCell, DistanceMap, HitConePoint, ReachedLength,
                       Trace, VisibleAtlas, VisibleSingularity, ball_area,
                       dijkstra, distance, metric_ball_singularities, trace,
                       visible_atlas, visible_singularities)
from .balls import BallComplex, ball_complex, injectivity_radius
from .stats import (McReport, ReferenceLaw, binomial_reference,
                    binomial_reference_total, chi2_gof, ks_uniform_angles,
                    mc_nearest_distance, mc_visible_count, poisson_pmf)
from .render import render_atlas_svg

__all__ = [name for name in dir() if not name.startswith("_")]
