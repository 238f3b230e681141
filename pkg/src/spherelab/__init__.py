"""Numerical geometry of curves, surfaces, tubes and bands in the round 3-sphere."""

__version__ = "0.1.0"

from .sphere import (  # noqa: E402
    QuadratureGrid,
    SpherePoint,
    TangentVector,
    ball_volume,
    exp_map,
    geodesic_distance,
    integrate_periodic,
    log_map,
    stereographic_inverse,
    stereographic_project,
)
from .immersions import (  # noqa: E402
    ClosedCurve,
    CurvatureFrame,
    GridSurface,
    SurfaceImmersion,
    area,
    clifford_torus,
    curvature_frame,
    fourier_torus,
    gauss_bonnet_characteristic,
    geodesic_sphere,
    great_circle,
    hopf_pair,
    load_grid_surface,
    make_builtin,
    rotation_torus,
    torus_knot_curve,
    willmore_energy,
)
from .tubes import (  # noqa: E402
    ChainReport,
    FocalReport,
    TubeSpec,
    curvature_focal_radius,
    focal_radius,
    reach_estimate,
    tube_volume_closed,
    tube_volume_numeric,
    verify_inequality_chain,
)
from .links import (  # noqa: E402
    CurvePair,
    complement_convexity_check,
    extremal_search,
    gehring_check,
    linking_number,
    set_distance,
)
from .bands import Band, band_width, build_tube_band, levelset_convexity_probe  # noqa: E402

__all__ = [
    "__version__",
    "QuadratureGrid",
    "SpherePoint",
    "TangentVector",
    "ball_volume",
    "exp_map",
    "geodesic_distance",
    "integrate_periodic",
    "log_map",
    "stereographic_inverse",
    "stereographic_project",
    "ClosedCurve",
    "CurvatureFrame",
    "GridSurface",
    "SurfaceImmersion",
    "area",
    "clifford_torus",
    "curvature_frame",
    "fourier_torus",
    "gauss_bonnet_characteristic",
    "geodesic_sphere",
    "great_circle",
    "hopf_pair",
    "load_grid_surface",
    "make_builtin",
    "rotation_torus",
    "torus_knot_curve",
    "willmore_energy",
    "ChainReport",
    "FocalReport",
    "TubeSpec",
    "curvature_focal_radius",
    "focal_radius",
    "reach_estimate",
    "tube_volume_closed",
    "tube_volume_numeric",
    "verify_inequality_chain",
    "CurvePair",
    "complement_convexity_check",
    "extremal_search",
    "gehring_check",
    "linking_number",
    "set_distance",
    "Band",
    "band_width",
    "build_tube_band",
    "levelset_convexity_probe",
]
