"""Pydantic request/response models for the HTTP API."""

from __future__ import annotations

import base64
import binascii
import io

import numpy as np
from PIL import Image
from pydantic import BaseModel, Field, model_validator

from ..annealing import AnnealSchedule
from ..colorspace import Srgb8
from ..naming import NameModel, SimilarityMeasure
from ..objective import ObjectiveConfig, Solution
from ..compositing import RenderOrder
from ..scene import (
    HistogramSpec,
    LayerMaskSet,
    SceneError,
    SceneStructure,
    scene_from_histograms,
    scene_from_masks,
)


class ApiError(Exception):
    """Domain-level request failure rendered as a structured error body."""

    def __init__(self, code: str, message: str, field: str | None = None, status: int = 400):
        super().__init__(message)
        self.code = code
        self.message = message
        self.field = field
        self.status = status


class HistogramSpecModel(BaseModel):
    class_labels: list[str]
    bin_edges: list[float]
    heights: list[list[float]]
    background: str = "#ffffff"


class MaskClassModel(BaseModel):
    label: str
    png_base64: str


class MaskSceneModel(BaseModel):
    background: str = "#ffffff"
    classes: list[MaskClassModel]


class SceneModel(BaseModel):
    histogram: HistogramSpecModel | None = None
    masks: MaskSceneModel | None = None

    @model_validator(mode="after")
    def _exactly_one(self):
        if (self.histogram is None) == (self.masks is None):
            raise ValueError("provide exactly one of 'histogram' or 'masks'")
        return self


class ConfigModel(BaseModel):
    weights: tuple[float, float, float] = (1.0, 1.0, 1.0)
    jnd_threshold: float = 3.0
    bg_contrast_min: float = 5.0
    similarity: str = "name"
    separability_scale: str = "normalized"
    blend_space: str = "linear"


class ScheduleModel(BaseModel):
    t_start: float = 100_000.0
    t_end: float = 0.001
    gamma: float = 0.99
    rgb_step: int = 10
    alpha_step: float = 0.1
    alpha_bounds: tuple[float, float] = (0.1, 0.9)
    max_candidate_retries: int = 100
    seed: int = 0


class SolutionModel(BaseModel):
    palette: list[str]
    opacities: list[float]
    order: list[int]


class OptimizeRequest(BaseModel):
    scene: SceneModel
    config: ConfigModel = Field(default_factory=ConfigModel)
    schedule: ScheduleModel = Field(default_factory=ScheduleModel)
    fixed_palette: list[str] | None = None


class ScoreRequest(BaseModel):
    scene: SceneModel
    solution: SolutionModel
    config: ConfigModel = Field(default_factory=ConfigModel)


class StimulusRequest(BaseModel):
    classes: int
    smoothness: str = "smooth"
    bins: int = 25
    seed: int = 0


# -- converters into engine types ---------------------------------------------


def _hex_color(text: str, field: str) -> Srgb8:
    try:
        return Srgb8.from_hex(text)
    except ValueError as exc:
        raise ApiError("invalid_color", str(exc), field=field) from exc


def build_scene(model: SceneModel) -> SceneStructure:
    if model.histogram is not None:
        h = model.histogram
        try:
            spec = HistogramSpec(
                class_labels=list(h.class_labels),
                bin_edges=list(h.bin_edges),
                heights=[list(row) for row in h.heights],
            )
            return scene_from_histograms(
                spec, background=_hex_color(h.background, "scene.histogram.background")
            )
        except SceneError as exc:
            raise ApiError("invalid_scene", str(exc), field="scene.histogram") from exc
    masks = []
    for i, entry in enumerate(model.masks.classes):
        try:
            raw = base64.b64decode(entry.png_base64, validate=True)
            img = Image.open(io.BytesIO(raw)).convert("L")
        except (binascii.Error, OSError) as exc:
            raise ApiError(
                "invalid_mask",
                f"cannot decode mask image: {exc}",
                field=f"scene.masks.classes[{i}].png_base64",
            ) from exc
        masks.append(np.asarray(img) > 127)
    try:
        mask_set = LayerMaskSet(
            masks=np.stack(masks),
            background=_hex_color(model.masks.background, "scene.masks.background"),
            class_labels=[c.label for c in model.masks.classes],
        )
        return scene_from_masks(mask_set)
    except (SceneError, ValueError) as exc:
        raise ApiError("invalid_scene", str(exc), field="scene.masks") from exc


def build_config(model: ConfigModel, name_model: NameModel) -> ObjectiveConfig:
    try:
        similarity = SimilarityMeasure(model.similarity)
    except ValueError as exc:
        raise ApiError("invalid_config", str(exc), field="config.similarity") from exc
    try:
        return ObjectiveConfig(
            weights=model.weights,
            jnd_threshold=model.jnd_threshold,
            bg_contrast_min=model.bg_contrast_min,
            similarity=similarity,
            separability_scale=model.separability_scale,
            blend_space=model.blend_space,
            name_model=name_model if similarity is SimilarityMeasure.NAME else None,
        )
    except ValueError as exc:
        raise ApiError("invalid_config", str(exc), field="config") from exc


def build_schedule(model: ScheduleModel) -> AnnealSchedule:
    try:
        return AnnealSchedule(
            t_start=model.t_start,
            t_end=model.t_end,
            gamma=model.gamma,
            rgb_step=model.rgb_step,
            alpha_step=model.alpha_step,
            alpha_bounds=model.alpha_bounds,
            max_candidate_retries=model.max_candidate_retries,
            seed=model.seed,
        )
    except ValueError as exc:
        raise ApiError("invalid_schedule", str(exc), field="schedule") from exc


def build_solution(model: SolutionModel) -> Solution:
    try:
        return Solution(
            palette=tuple(Srgb8.from_hex(h) for h in model.palette),
            opacities=tuple(model.opacities),
            order=RenderOrder(tuple(model.order)),
        )
    except ValueError as exc:
        raise ApiError("invalid_solution", str(exc), field="solution") from exc


def build_palette(hexes: list[str] | None) -> tuple[Srgb8, ...] | None:
    if hexes is None:
        return None
    return tuple(_hex_color(h, f"fixed_palette[{i}]") for i, h in enumerate(hexes))
