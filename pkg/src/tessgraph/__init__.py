"""Planar geometric graphs, their open-cell faces, and typical-cell statistics."""
from .errors import (
    AmbiguousContainment,
    CoverageTimeout,
    CrossingLinkInteriors,
    DegenerateTangency,
    DuplicateLink,
    DuplicateNode,
    EmptyWindow,
    GeometryError,
    GraphValidationError,
    LoopLink,
    NodeOnLinkInterior,
    NonClosingWalk,
    ToleranceFailure,
    TurningSumAnomaly,
)
from .faces import (
    DirectedLink,
    Face,
    FaceCircuit,
    assemble_faces,
    extract_circuits,
    face_metrics,
    first_exit_step,
    partition,
    reference_point,
    side_membership_pi_check,
)
from .generators import (
    GeneratorConfig,
    delete_edge_interiors,
    falling_leaves,
    fig4a_fixture,
    generate,
    hexagon_fixture,
    poisson_lines,
)
from .geometry import ANGLE_TOL, MERGE_TOL, SNAP_TOL, Point2, Window
from .graph import GeometricGraph, VertexClass, build_graph, classify_vertex, empty_graph, pi_angle_counts
from .planarize import planarize
from .stats import (
    EstimatorReport,
    WindowCounts,
    block_counts,
    cell_union_stats,
    check_identities,
    estimate,
    euler_terms,
    reciprocal_area_estimate,
    small_disc_edge_check,
    validate_formulas,
    window_counts,
    window_euler_terms,
)
from .window import Arc, WindowGraph, clip_to_window, window_cells

__version__ = "0.1.0"
