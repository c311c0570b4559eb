"""Valence-arousal expression grid synthesis toolkit."""

from ._core import (
    GridPoint,
    LandmarkSet,
    MorphPlan,
    MorphRejected,
    NirReferenceStats,
    RidgeModel,
    VATemplate,
    blend_label,
    build_grid,
    ccc,
    combine3,
    compute_reference_stats,
    delaunay,
    draw_face,
    extend_with_boundary,
    extract_features,
    fit_baseline,
    interpolate,
    load_image,
    morph_grid_point,
    morph_pair,
    parse_landmarks,
    plan_morphs,
    polar_to_va,
    predict_baseline,
    rmse,
    save_png,
    to_luminance,
    to_nir,
    write_fixture_dataset,
)

try:
    from ._core import __version__
except ImportError:  # pragma: no cover - version baked in at build time
    __version__ = "0.0.0"

__all__ = [
    "GridPoint",
    "LandmarkSet",
    "MorphPlan",
    "MorphRejected",
    "NirReferenceStats",
    "RidgeModel",
    "VATemplate",
    "blend_label",
    "build_grid",
    "ccc",
    "combine3",
    "compute_reference_stats",
    "delaunay",
    "draw_face",
    "extend_with_boundary",
    "extract_features",
    "fit_baseline",
    "interpolate",
    "load_image",
    "morph_grid_point",
    "morph_pair",
    "parse_landmarks",
    "plan_morphs",
    "polar_to_va",
    "predict_baseline",
    "rmse",
    "save_png",
    "to_luminance",
    "to_nir",
    "write_fixture_dataset",
    "__version__",
]
