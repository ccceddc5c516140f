"""Orthogonal projections along geodesics in the Poincare ball."""
from ._backend import backend_name
from .dimension import DimensionEstimate, box_count, box_dimension, covering_measure, interior_occupancy
from .errors import HyprojError, InsufficientScalesError, NumericalError, UsageError
from .fractals import (
    Ifs,
    PointCloud,
    Similarity,
    cantor_dust,
    chaos_game,
    embed_in_ball,
    four_corner,
    generate_depth,
    segment,
    similarity_dimension,
)
from .grassmann import MPlane, coords_in_plane, embed, euclid_project, principal_angles, sample_haar
from .hypgeo import (
    Geodesic,
    Point,
    geodesic_point,
    initial_direction,
    klein_distance,
    poincare_distance,
    psi,
    psi_inv,
)
from .projection import foot_angle, hyp_project, oracle_project, project_cloud, project_coords

__version__ = "0.1.0"
