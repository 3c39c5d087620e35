"""Color, opacity, and rendering-order optimization for translucent overlapped charts."""

from .annealing import (
    AnnealSchedule,
    AnnealTrace,
    InfeasibleStart,
    OptimizeResult,
    optimize,
    optimize_multi,
)
from .colorspace import LabColor, LinearRgb, Srgb8, ciede2000, lch_hue, luminance_diff, srgb_to_lab
from .compositing import BlendSpace, RenderOrder, Rgba, over, region_color
from .naming import (
    NameModel,
    SimilarityMeasure,
    load_name_model,
    name_similarity,
    synthetic_name_model,
)
from .objective import (
    ObjectiveConfig,
    ScoreBreakdown,
    SeparabilityScale,
    Solution,
    check_constraints,
    total_score,
)
from .oracle import CandidateGrid, exhaustive_best, reference_score
from .scene import (
    HistogramSpec,
    LayerMaskSet,
    SceneStructure,
    scene_from_histograms,
    scene_from_masks,
    validate_scene,
)
from .stimuli import Smoothness, StimulusParams, gen_stimulus

__version__ = "0.1.0"

__all__ = [
    "AnnealSchedule",
    "AnnealTrace",
    "BlendSpace",
    "CandidateGrid",
    "HistogramSpec",
    "InfeasibleStart",
    "LabColor",
    "LayerMaskSet",
    "LinearRgb",
    "NameModel",
    "ObjectiveConfig",
    "OptimizeResult",
    "RenderOrder",
    "Rgba",
    "SceneStructure",
    "ScoreBreakdown",
    "SeparabilityScale",
    "SimilarityMeasure",
    "Smoothness",
    "Solution",
    "Srgb8",
    "StimulusParams",
    "check_constraints",
    "ciede2000",
    "exhaustive_best",
    "gen_stimulus",
    "lch_hue",
    "load_name_model",
    "luminance_diff",
    "name_similarity",
    "optimize",
    "optimize_multi",
    "over",
    "reference_score",
    "region_color",
    "scene_from_histograms",
    "scene_from_masks",
    "srgb_to_lab",
    "synthetic_name_model",
    "total_score",
    "validate_scene",
]
