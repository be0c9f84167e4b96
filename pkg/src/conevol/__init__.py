"""Cone-volume measures of convex polytopes: subspace concentration, the
U-functional lower bound, and piecewise-polynomial X-rays."""

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import (
    CombinatorialLimit,
    DegenerateInput,
    DegenerateNormals,
    DegenerateSample,
    GeometryError,
    Infeasible,
    InterpolationMismatch,
    InvalidK,
    MalformedInput,
    NotCentered,
    OriginNotInterior,
    ToleranceFailure,
    TooFewPoints,
    Unbounded,
)
from .generators import GeneratorSpec, generate
from .geometry import (
    Facet,
    Polytope,
    build_from_halfspaces,
    build_from_vertices,
    center_at_centroid,
    centroid,
    facet_data,
    linear_image,
    section_volume,
    translate,
    volume,
)
from .linalg import Subspace
from .measure import ConeVolumeMeasure, cone_volume_measure, measure_of_subspace
from .scc import (
    SccReport,
    check_scc,
    check_scc_measure,
    complementary_witness,
    detect_direct_sum_split,
    enumerate_normal_spans,
    is_parallelotope,
)
from .ufunctional import (
    UReport,
    check_recursion,
    check_u_inequality,
    sigma_k,
    sigma_k_power,
    u_functional,
    u_report,
)
from .verify import VerificationReport, run_verify
from .xray import (
    PiecewisePolynomial,
    check_log_concavity,
    divergence_identity,
    first_moment,
    gradient_moment,
    integrate_xray,
    is_constant_section,
    xray_piecewise,
    xray_value,
)

__version__ = "0.1.0"

__all__ = [
    "CombinatorialLimit",
    "ConeVolumeMeasure",
    "DEFAULT_TOLERANCES",
    "DegenerateInput",
    "DegenerateNormals",
    "DegenerateSample",
    "Facet",
    "GeneratorSpec",
    "GeometryError",
    "Infeasible",
    "InterpolationMismatch",
    "InvalidK",
    "MalformedInput",
    "NotCentered",
    "OriginNotInterior",
    "PiecewisePolynomial",
    "Polytope",
    "SccReport",
    "Subspace",
    "ToleranceFailure",
    "Tolerances",
    "TooFewPoints",
    "UReport",
    "Unbounded",
    "VerificationReport",
    "build_from_halfspaces",
    "build_from_vertices",
    "center_at_centroid",
    "centroid",
    "check_log_concavity",
    "check_recursion",
    "check_scc",
    "check_scc_measure",
    "check_u_inequality",
    "complementary_witness",
    "cone_volume_measure",
    "detect_direct_sum_split",
    "divergence_identity",
    "enumerate_normal_spans",
    "facet_data",
    "first_moment",
    "generate",
    "gradient_moment",
    "integrate_xray",
    "is_constant_section",
    "is_parallelotope",
    "linear_image",
    "measure_of_subspace",
    "run_verify",
    "section_volume",
    "sigma_k",
    "sigma_k_power",
    "translate",
    "u_functional",
    "u_report",
    "volume",
    "xray_piecewise",
    "xray_value",
]
