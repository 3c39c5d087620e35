"""File formats: histogram specs, mask manifests, solution documents.

All structured documents are JSON with a `format` tag; serialization is
canonical (sorted keys, fixed separators) so identical runs produce
byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .annealing import AnnealSchedule
from .colorspace import Srgb8
from .naming import NameModel, load_name_model, model_fingerprint, synthetic_name_model
from .objective import ObjectiveConfig, ScoreBreakdown, Solution
from .compositing import RenderOrder
from .scene import HistogramSpec, LayerMaskSet, SceneError, SceneStructure, scene_from_histograms, scene_from_masks
from .stimuli import GeneratedStimulus

__all__ = [
    "DocumentError",
    "SceneInput",
    "canonical_json",
    "histogram_spec_to_dict",
    "histogram_spec_from_dict",
    "read_scene_input",
    "load_mask_manifest",
    "read_name_model_source",
    "solution_document",
    "solution_from_document",
    "write_text",
]

HISTOGRAM_FORMAT = "histogram-spec/1"
MANIFEST_FORMAT = "mask-manifest/1"
SOLUTION_FORMAT = "solution/1"


class DocumentError(ValueError):
    """Raised for unreadable or malformed document files."""


def canonical_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def write_text(path: str | Path, text: str):
    Path(path).write_text(text, encoding="utf-8")


def _load_json(path: str | Path) -> dict:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise DocumentError(f"{path}: top-level value must be an object")
    return doc


# -- histogram specs ---------------------------------------------------------


def histogram_spec_to_dict(
    spec: HistogramSpec,
    background: Srgb8 = Srgb8(255, 255, 255),
    stimulus: GeneratedStimulus | None = None,
) -> dict:
    doc = {
        "format": HISTOGRAM_FORMAT,
        "class_labels": list(spec.class_labels),
        "bin_edges": list(spec.bin_edges),
        "heights": [list(row) for row in spec.heights],
        "background": background.to_hex(),
    }
    if stimulus is not None:
        doc["generation"] = {
            "sigmas": stimulus.sigmas,
            "amplitudes": stimulus.amplitudes,
            "means": stimulus.means,
            "kl": stimulus.kl,
        }
    return doc


def histogram_spec_from_dict(doc: dict) -> tuple[HistogramSpec, Srgb8]:
    if doc.get("format") != HISTOGRAM_FORMAT:
        raise DocumentError(f"unsupported histogram format tag {doc.get('format')!r}")
    for key in ("class_labels", "bin_edges", "heights"):
        if key not in doc:
            raise DocumentError(f"histogram spec missing '{key}'")
    try:
        spec = HistogramSpec(
            class_labels=list(doc["class_labels"]),
            bin_edges=list(doc["bin_edges"]),
            heights=[list(row) for row in doc["heights"]],
        )
    except SceneError as exc:
        raise DocumentError(f"invalid histogram spec: {exc}") from exc
    try:
        background = Srgb8.from_hex(doc.get("background", "#ffffff"))
    except ValueError as exc:
        raise DocumentError(str(exc)) from exc
    return spec, background


# -- mask manifests ----------------------------------------------------------


def load_mask_manifest(path: str | Path) -> LayerMaskSet:
    """Load per-class grayscale PNGs listed in a manifest.

    Manifest layout: {"format": "mask-manifest/1", "background": "#rrggbb",
    "classes": [{"label": ..., "mask": "relative/path.png"}, ...]}.
    Mask pixels above 50% gray count as covered.
    """
    path = Path(path)
    doc = _load_json(path)
    if doc.get("format") != MANIFEST_FORMAT:
        raise DocumentError(f"unsupported manifest format tag {doc.get('format')!r}")
    classes = doc.get("classes")
    if not isinstance(classes, list) or not classes:
        raise DocumentError("manifest must list at least one class")
    labels, masks = [], []
    shape = None
    for i, entry in enumerate(classes):
        if "mask" not in entry:
            raise DocumentError(f"classes[{i}] missing 'mask' path")
        mask_path = path.parent / entry["mask"]
        try:
            img = Image.open(mask_path).convert("L")
        except OSError as exc:
            raise DocumentError(f"cannot read mask {mask_path}: {exc}") from exc
        arr = np.asarray(img) > 127
        if shape is None:
            shape = arr.shape
        elif arr.shape != shape:
            raise DocumentError(
                f"mask {mask_path} has size {arr.shape}, expected {shape}"
            )
        masks.append(arr)
        labels.append(entry.get("label", f"class {i}"))
    try:
        background = Srgb8.from_hex(doc.get("background", "#ffffff"))
    except ValueError as exc:
        raise DocumentError(str(exc)) from exc
    return LayerMaskSet(masks=np.stack(masks), background=background, class_labels=labels)


@dataclass
class SceneInput:
    """A loaded scene plus whichever source representation backed it."""

    scene: SceneStructure
    histogram: HistogramSpec | None = None
    masks: LayerMaskSet | None = None


def read_scene_input(path: str | Path) -> SceneInput:
    """Load a scene from either a histogram spec or a mask manifest.

    The source representation rides along: renderers need the bar geometry
    for analytic scenes and the mask stack for raster ones.
    """
    doc = _load_json(path)
    tag = doc.get("format")
    if tag == HISTOGRAM_FORMAT:
        spec, background = histogram_spec_from_dict(doc)
        return SceneInput(scene_from_histograms(spec, background=background), histogram=spec)
    if tag == MANIFEST_FORMAT:
        masks = load_mask_manifest(path)
        return SceneInput(scene_from_masks(masks), masks=masks)
    raise DocumentError(f"unrecognized scene input format tag {tag!r}")


# -- name models -------------------------------------------------------------


def read_name_model_source(source: str) -> NameModel:
    """Resolve a name model from a path, or the literal 'builtin'."""
    if source == "builtin":
        return synthetic_name_model()
    try:
        data = Path(source).read_bytes()
    except OSError as exc:
        raise DocumentError(f"cannot read name model {source}: {exc}") from exc
    return load_name_model(data)


# -- solution documents ------------------------------------------------------


def config_echo(cfg: ObjectiveConfig) -> dict:
    echo = {
        "weights": list(cfg.weights),
        "jnd_threshold": cfg.jnd_threshold,
        "bg_contrast_min": cfg.bg_contrast_min,
        "similarity": cfg.similarity.value,
        "separability_scale": cfg.separability_scale.value,
        "blend_space": cfg.blend_space.value,
    }
    if cfg.name_model is not None:
        echo["name_model_fingerprint"] = model_fingerprint(cfg.name_model)
    return echo


def schedule_echo(schedule: AnnealSchedule) -> dict:
    return {
        "t_start": schedule.t_start,
        "t_end": schedule.t_end,
        "gamma": schedule.gamma,
        "rgb_step": schedule.rgb_step,
        "alpha_step": schedule.alpha_step,
        "alpha_bounds": list(schedule.alpha_bounds),
        "max_candidate_retries": schedule.max_candidate_retries,
        "seed": schedule.seed,
    }


def solution_document(
    solution: Solution,
    breakdown: ScoreBreakdown,
    cfg: ObjectiveConfig,
    schedule: AnnealSchedule | None = None,
) -> dict:
    doc = {
        "format": SOLUTION_FORMAT,
        "palette": [c.to_hex() for c in solution.palette],
        "opacities": list(solution.opacities),
        "order": list(solution.order),
        "score": breakdown.to_dict(),
        "config": config_echo(cfg),
    }
    if schedule is not None:
        doc["schedule"] = schedule_echo(schedule)
    return doc


def solution_from_document(doc: dict) -> Solution:
    if doc.get("format") != SOLUTION_FORMAT:
        raise DocumentError(f"unsupported solution format tag {doc.get('format')!r}")
    for key in ("palette", "opacities", "order"):
        if key not in doc:
            raise DocumentError(f"solution document missing '{key}'")
    try:
        return Solution(
            palette=tuple(Srgb8.from_hex(h) for h in doc["palette"]),
            opacities=tuple(doc["opacities"]),
            order=RenderOrder(tuple(doc["order"])),
        )
    except ValueError as exc:
        raise DocumentError(f"invalid solution document: {exc}") from exc
