"""Scoring of palette/opacity/order solutions against a scene.

The total score combines within-class association (blends should keep the
name of their parent classes), between-class disassociation (unrelated
regions should not share a name), and color separability over the region
neighborhood graph, subject to two hard constraints: a pairwise
just-noticeable-difference floor and a minimum lightness contrast against
the background.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .colorspace import LabColor, Srgb8, ciede2000_pairs, srgb_to_lab
from .compositing import (
    BlendSpace,
    RenderOrder,
    _from_blend_floats,
    _over_channels,
    _to_blend_floats,
    region_color,
)
from .naming import NameModel, SimilarityMeasure, alt_similarity, nearest_bin, similarity_by_bins
from .scene import SceneStructure

__all__ = [
    "SeparabilityScale",
    "ObjectiveConfig",
    "Solution",
    "ScoreBreakdown",
    "ConstraintReport",
    "ScoreContext",
    "resolve_region_colors",
    "class_weight",
    "association_term",
    "disassociation_term",
    "separability_term",
    "check_constraints",
    "total_score",
]


class SeparabilityScale(str, Enum):
    RAW = "raw"
    NORMALIZED = "normalized"


@dataclass
class ObjectiveConfig:
    """Weights, thresholds, and measure selection for the score.

    `weights` are the three term weights; `jnd_threshold` is the pairwise
    color-difference floor (strict), `bg_contrast_min` the minimum lightness
    difference against the background. NAME similarity requires `name_model`.
    """

    weights: tuple[float, float, float] = (1.0, 1.0, 1.0)
    jnd_threshold: float = 3.0
    bg_contrast_min: float = 5.0
    similarity: SimilarityMeasure = SimilarityMeasure.NAME
    separability_scale: SeparabilityScale = SeparabilityScale.NORMALIZED
    blend_space: BlendSpace = BlendSpace.LINEAR
    name_model: NameModel | None = None

    def __post_init__(self):
        self.weights = tuple(float(w) for w in self.weights)
        if len(self.weights) != 3 or any(w < 0 for w in self.weights):
            raise ValueError("weights must be three non-negative numbers")
        if self.jnd_threshold <= 0:
            raise ValueError("jnd_threshold must be positive")
        if self.bg_contrast_min < 0:
            raise ValueError("bg_contrast_min must be non-negative")
        self.similarity = SimilarityMeasure(self.similarity)
        self.separability_scale = SeparabilityScale(self.separability_scale)
        self.blend_space = BlendSpace(self.blend_space)
        if self.similarity is SimilarityMeasure.NAME and self.name_model is None:
            raise ValueError("NAME similarity requires a name model")


@dataclass(frozen=True)
class Solution:
    """A candidate design: palette colors, per-class opacities, render order."""

    palette: tuple[Srgb8, ...]
    opacities: tuple[float, ...]
    order: RenderOrder

    def __post_init__(self):
        object.__setattr__(self, "palette", tuple(self.palette))
        object.__setattr__(self, "opacities", tuple(float(a) for a in self.opacities))
        m = len(self.palette)
        if m == 0:
            raise ValueError("solution needs at least one class")
        if len(self.opacities) != m or len(self.order) != m:
            raise ValueError("palette, opacities, and order must have equal length")
        for a in self.opacities:
            if not 0.0 <= a <= 1.0:
                raise ValueError(f"opacity {a} outside [0, 1]")

    @property
    def m(self) -> int:
        return len(self.palette)


@dataclass
class ConstraintReport:
    """Hard-constraint diagnostics: every violating pair/region with its value."""

    jnd_threshold: float
    bg_contrast_min: float
    jnd_violations: list[tuple[int, int, float]] = field(default_factory=list)
    contrast_violations: list[tuple[int, float]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.jnd_violations and not self.contrast_violations

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "jnd_threshold": self.jnd_threshold,
            "bg_contrast_min": self.bg_contrast_min,
            "jnd_violations": [
                {"region_a": i, "region_b": j, "delta_e": v} for i, j, v in self.jnd_violations
            ],
            "contrast_violations": [
                {"region": i, "lightness_diff": v} for i, v in self.contrast_violations
            ],
        }


@dataclass
class ScoreBreakdown:
    """Score terms plus resolved region colors and degenerate-case notes."""

    association: float
    disassociation: float
    separability: float
    total: float
    feasible: bool
    region_colors: list[tuple[Srgb8, LabColor]]
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "association": self.association,
            "disassociation": self.disassociation,
            "separability": self.separability,
            "total": self.total,
            "feasible": self.feasible,
            "region_colors": [
                {"srgb": c.to_hex(), "lab": [lab.L, lab.a, lab.b]}
                for c, lab in self.region_colors
            ],
            "notes": list(self.notes),
        }


@functools.lru_cache(maxsize=1 << 18)
def _lab_of_rgb(rgb: tuple[int, int, int]) -> LabColor:
    return srgb_to_lab(Srgb8(*rgb))


def resolve_region_colors(
    scene: SceneStructure,
    sol: Solution,
    blend_space: BlendSpace = BlendSpace.LINEAR,
) -> list[tuple[Srgb8, LabColor]]:
    """Displayed color of each region, in region index order, as sRGB + Lab."""
    if sol.m != scene.m:
        raise ValueError(f"solution has {sol.m} classes, scene has {scene.m}")
    out = []
    for region in scene.regions:
        c = region_color(
            region.signature, sol.palette, sol.opacities, sol.order, scene.background, blend_space
        )
        out.append((c, _lab_of_rgb(c.as_tuple())))
    return out


def class_weight(scene: SceneStructure, i: int) -> float:
    """Difficulty weight of class i, in [0, 1).

    Scales with how many regions the class spans (relative to the busiest
    class) and with the overlapped share of the class's aggregate footprint.
    """
    if not 0 <= i < scene.m:
        raise ValueError(f"class index {i} out of range")
    col_sums = scene.membership.sum(axis=0)
    base = scene.base_region_index[i]
    aggregate = float(scene.pair_share[base] @ scene.sizes)
    return float(col_sums[i] / col_sums.max()) * (1.0 - float(scene.sizes[base]) / aggregate)


def _similarity(cfg: ObjectiveConfig, lab1: LabColor, lab2: LabColor) -> float:
    return alt_similarity(cfg.similarity, lab1, lab2, model=cfg.name_model)


def association_term(
    scene: SceneStructure,
    colors: list[tuple[Srgb8, LabColor]],
    cfg: ObjectiveConfig,
    notes: list[str] | None = None,
) -> float:
    """Within-class association: weighted mean similarity between each class's
    base-region color and its composite-region colors, plus the worst such
    similarity. Scenes without overlaps score the vacuous 0 + 1."""
    labs = [lab for _, lab in colors]
    singles = sum(1 for r in scene.regions if len(r.signature) == 1)
    pairs = []
    for c in range(scene.m):
        b = scene.base_region_index[c]
        for j in range(singles, scene.n):
            if j != b:
                pairs.append((c, b, j, int(scene.pair_share[b, j])))
    weighted = [p for p in pairs if p[3] > 0]
    if not weighted:
        if notes is not None:
            notes.append("no overlapping regions: association is vacuous (0 + 1)")
        return 1.0
    denom = sum(w for _, _, _, w in pairs)
    acc = 0.0
    min_s = math.inf
    for c, b, j, w in weighted:
        s = _similarity(cfg, labs[b], labs[j])
        acc += math.sqrt(class_weight(scene, c)) * w * s
        min_s = min(min_s, s)
    return acc / denom + min_s


def disassociation_term(
    scene: SceneStructure,
    colors: list[tuple[Srgb8, LabColor]],
    cfg: ObjectiveConfig,
    notes: list[str] | None = None,
) -> float:
    """Between-class disassociation: mean similarity over region pairs that
    share no class, plus the worst (highest) such similarity. Zero when every
    pair of regions shares a class."""
    labs = [lab for _, lab in colors]
    values = [
        _similarity(cfg, labs[i], labs[j])
        for i in range(scene.n)
        for j in range(i + 1, scene.n)
        if scene.pair_share[i, j] == 0
    ]
    if not values:
        if notes is not None:
            notes.append("no disjoint region pairs: disassociation is vacuous (0)")
        return 0.0
    return sum(values) / len(values) + max(values)


def separability_term(
    scene: SceneStructure,
    colors: list[tuple[Srgb8, LabColor]],
    cfg: ObjectiveConfig,
    notes: list[str] | None = None,
) -> float:
    """Color separability: the worst size-weighted color difference across the
    neighborhood graph, D(c_i, c_j) * (1 + size_i) minimized over both
    directions of every edge. With no neighbors the term is a vacuous ceiling."""
    scale = 100.0 if cfg.separability_scale is SeparabilityScale.NORMALIZED else 1.0
    if not scene.adjacency:
        if notes is not None:
            notes.append("no neighboring regions: separability is vacuous (ceiling)")
        return 100.0 / scale
    labs = [lab for _, lab in colors]
    best = math.inf
    for a, b in scene.adjacency:
        d = ciede2000_pairs(
            np.asarray([labs[a].as_tuple()]), np.asarray([labs[b].as_tuple()])
        )[0]
        best = min(
            best,
            d / scale * (1.0 + float(scene.sizes[a])),
            d / scale * (1.0 + float(scene.sizes[b])),
        )
    return float(best)


def check_constraints(
    scene: SceneStructure,
    colors: list[tuple[Srgb8, LabColor]],
    cfg: ObjectiveConfig,
) -> ConstraintReport:
    """Evaluate both hard constraints over the resolved region colors."""
    report = ConstraintReport(cfg.jnd_threshold, cfg.bg_contrast_min)
    labs = [lab for _, lab in colors]
    bg = _lab_of_rgb(scene.background.as_tuple())
    for i in range(len(labs)):
        for j in range(i + 1, len(labs)):
            d = float(
                ciede2000_pairs(
                    np.asarray([labs[i].as_tuple()]), np.asarray([labs[j].as_tuple()])
                )[0]
            )
            if d <= cfg.jnd_threshold:
                report.jnd_violations.append((i, j, d))
    for i, lab in enumerate(labs):
        ld = abs(lab.L - bg.L)
        if ld < cfg.bg_contrast_min:
            report.contrast_violations.append((i, ld))
    return report


def total_score(scene: SceneStructure, sol: Solution, cfg: ObjectiveConfig) -> ScoreBreakdown:
    """Resolve region colors and combine the three weighted terms."""
    return ScoreContext(scene, cfg).evaluate(sol)


class ScoreContext:
    """Reusable evaluator for one (scene, config) pair.

    Precomputes everything solution-independent: class weights, the pair
    index arrays for the three terms, and the decoded background. Safe to
    share across threads for concurrent candidate scoring.
    """

    def __init__(self, scene: SceneStructure, cfg: ObjectiveConfig):
        self.scene = scene
        self.cfg = cfg
        n, m = scene.n, scene.m

        self._bg_floats = _to_blend_floats(scene.background, cfg.blend_space)
        self._bg_lab = _lab_of_rgb(scene.background.as_tuple())

        iu, ju = np.triu_indices(n, k=1)
        self._iu, self._ju = iu, ju
        pos = {}
        for p, (i, j) in enumerate(zip(iu.tolist(), ju.tolist())):
            pos[(i, j)] = p
        self._pair_pos = pos

        self._sqrt_psi = [math.sqrt(class_weight(scene, c)) for c in range(m)]
        singles = sum(1 for r in scene.regions if len(r.signature) == 1)
        self._assoc_pairs = []  # (class, base region, composite region, share)
        for c in range(m):
            b = scene.base_region_index[c]
            for j in range(singles, n):
                if j != b:
                    self._assoc_pairs.append((c, b, j, int(scene.pair_share[b, j])))
        self._assoc_denom = sum(w for _, _, _, w in self._assoc_pairs)

        self._disjoint_pairs = [
            (i, j) for i in range(n) for j in range(i + 1, n) if scene.pair_share[i, j] == 0
        ]
        self._adjacency = sorted(scene.adjacency)

    # -- solution resolution ------------------------------------------------

    def resolve(self, sol: Solution) -> tuple[list[Srgb8], np.ndarray]:
        """Region colors plus their Lab coordinates as an (n, 3) array."""
        decoded = [_to_blend_floats(p, self.cfg.blend_space) for p in sol.palette]
        srgbs = []
        labs = np.empty((self.scene.n, 3))
        for idx, region in enumerate(self.scene.regions):
            sig = region.signature
            acc, acc_a = self._bg_floats, 1.0
            for cls in sol.order:
                if cls in sig:
                    acc, acc_a = _over_channels(decoded[cls], sol.opacities[cls], acc, acc_a)
            c = _from_blend_floats(acc, self.cfg.blend_space)
            srgbs.append(c)
            labs[idx] = _lab_of_rgb(c.as_tuple()).as_tuple()
        return srgbs, labs

    def _pair_distances(self, labs: np.ndarray) -> np.ndarray:
        if self._iu.size == 0:
            return np.empty(0)
        return ciede2000_pairs(labs[self._iu], labs[self._ju])

    def feasible(self, sol: Solution) -> bool:
        """Fast hard-constraint check used during candidate generation."""
        _, labs = self.resolve(sol)
        if np.abs(labs[:, 0] - self._bg_lab.L).min() < self.cfg.bg_contrast_min:
            return False
        de = self._pair_distances(labs)
        return bool((de > self.cfg.jnd_threshold).all()) if de.size else True

    # -- similarity ----------------------------------------------------------

    def _pair_similarity(self, labs: np.ndarray, de: np.ndarray):
        """Similarity lookup for region pairs under the configured measure."""
        cfg = self.cfg
        if cfg.similarity is SimilarityMeasure.NAME:
            bins = [nearest_bin(cfg.name_model, tuple(lab)) for lab in labs]

            def sim(i: int, j: int) -> float:
                return similarity_by_bins(cfg.name_model, bins[i], bins[j])

        elif cfg.similarity is SimilarityMeasure.COLOR:

            def sim(i: int, j: int) -> float:
                key = (i, j) if i < j else (j, i)
                return min(1.0, max(0.0, 1.0 - de[self._pair_pos[key]] / 100.0))

        elif cfg.similarity is SimilarityMeasure.LUMINANCE:

            def sim(i: int, j: int) -> float:
                return min(1.0, max(0.0, 1.0 - 0.01 * abs(labs[i, 0] - labs[j, 0])))

        else:
            hues = [_hue_of(lab) for lab in labs]

            def sim(i: int, j: int) -> float:
                dh = abs(hues[i] - hues[j])
                if dh > 180.0:
                    dh = 360.0 - dh
                return min(1.0, max(0.0, 1.0 - dh / 180.0))

        return sim

    # -- full evaluation -----------------------------------------------------

    def evaluate(self, sol: Solution) -> ScoreBreakdown:
        if sol.m != self.scene.m:
            raise ValueError(f"solution has {sol.m} classes, scene has {self.scene.m}")
        notes: list[str] = []
        srgbs, labs = self.resolve(sol)
        de = self._pair_distances(labs)

        feasible = bool(
            (de > self.cfg.jnd_threshold).all()
            and np.abs(labs[:, 0] - self._bg_lab.L).min() >= self.cfg.bg_contrast_min
        )

        sim = self._pair_similarity(labs, de)

        weighted = [(c, b, j, w) for c, b, j, w in self._assoc_pairs if w > 0]
        if not weighted:
            notes.append("no overlapping regions: association is vacuous (0 + 1)")
            association = 1.0
        else:
            acc = 0.0
            min_s = math.inf
            for c, b, j, w in weighted:
                s = sim(b, j)
                acc += self._sqrt_psi[c] * w * s
                min_s = min(min_s, s)
            association = acc / self._assoc_denom + min_s

        if not self._disjoint_pairs:
            notes.append("no disjoint region pairs: disassociation is vacuous (0)")
            disassociation = 0.0
        else:
            values = [sim(i, j) for i, j in self._disjoint_pairs]
            disassociation = sum(values) / len(values) + max(values)

        scale = 100.0 if self.cfg.separability_scale is SeparabilityScale.NORMALIZED else 1.0
        if not self._adjacency:
            notes.append("no neighboring regions: separability is vacuous (ceiling)")
            separability = 100.0 / scale
        else:
            separability = math.inf
            for a, b in self._adjacency:
                d = de[self._pair_pos[(a, b)]]
                separability = min(
                    separability,
                    d / scale * (1.0 + float(self.scene.sizes[a])),
                    d / scale * (1.0 + float(self.scene.sizes[b])),
                )

        w1, w2, w3 = self.cfg.weights
        association = float(association)
        disassociation = float(disassociation)
        separability = float(separability)
        region_colors = [(c, _lab_of_rgb(c.as_tuple())) for c in srgbs]
        return ScoreBreakdown(
            association=association,
            disassociation=disassociation,
            separability=separability,
            total=float(w1 * association - w2 * disassociation + w3 * separability),
            feasible=feasible,
            region_colors=region_colors,
            notes=notes,
        )

    def constraint_report(self, sol: Solution) -> ConstraintReport:
        colors = [(c, _lab_of_rgb(c.as_tuple())) for c in self.resolve(sol)[0]]
        return check_constraints(self.scene, colors, self.cfg)


def _hue_of(lab: np.ndarray) -> float:
    a, b = float(lab[1]), float(lab[2])
    if a == 0.0 and b == 0.0:
        return 0.0
    return math.degrees(math.atan2(b, a)) % 360.0
