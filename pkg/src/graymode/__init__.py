"""Characterization toolkit for linear color-to-gray projection operators.

Core pieces: exact projection and CIE L* arithmetic (color), the one-pixel-
per-color reference image (reference), the K-family algebra over weight
triples (families), single-pass EQ/BM mode computation over the full RGB
cube (modes), shape classification (classify), exportable reports (report),
and the two-stage mosaic evaluation harness (evalservice).
"""

from .classify import (
    BmClass,
    ClassifierConfig,
    EqClass,
    TaxonomyLabel,
    UnclassifiableError,
    classify_bm,
    classify_eq,
    taxonomy,
)
from .color import (
    CHOSEN,
    STANDARD,
    UNIFORM,
    EmptyImageError,
    LinearOperator,
    LuminanceSample,
    apply,
    apply_image,
    cie_lstar,
    gray_brightness,
)
from .families import (
    CASE_STUDY_KS,
    FamilyIncompatibleError,
    GridCandidate,
    InfeasibleMemberError,
    MemberSpec,
    case_study_grid,
    enumerate_grid,
    family_of,
    member_from_blue,
    member_from_green,
    member_from_red,
)
from .modes import BmMode, EqMode, bm_deviation, compute_eq, compute_modes, priority
from .reference import (
    COLOR_COUNT,
    color_at_1d,
    color_index,
    coord_2d,
    iterate_colors,
    render_reference,
)
from .report import ModeReport, analyze_operator

__all__ = [
    "BmClass",
    "BmMode",
    "CASE_STUDY_KS",
    "CHOSEN",
    "COLOR_COUNT",
    "ClassifierConfig",
    "EmptyImageError",
    "EqClass",
    "EqMode",
    "FamilyIncompatibleError",
    "GridCandidate",
    "InfeasibleMemberError",
    "LinearOperator",
    "LuminanceSample",
    "MemberSpec",
    "ModeReport",
    "STANDARD",
    "TaxonomyLabel",
    "UNIFORM",
    "UnclassifiableError",
    "analyze_operator",
    "apply",
    "apply_image",
    "bm_deviation",
    "case_study_grid",
    "cie_lstar",
    "classify_bm",
    "classify_eq",
    "color_at_1d",
    "color_index",
    "compute_eq",
    "compute_modes",
    "coord_2d",
    "enumerate_grid",
    "family_of",
    "gray_brightness",
    "iterate_colors",
    "member_from_blue",
    "member_from_green",
    "member_from_red",
    "priority",
    "render_reference",
    "taxonomy",
]
