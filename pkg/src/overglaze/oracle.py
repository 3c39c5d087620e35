"""Independent verification: a literal re-implementation of the score and an
exhaustive search over small discrete design spaces.

This module deliberately avoids the production scoring code. It shares only
the color conversion and compositing primitives; everything else (pair-share
recomputation, class weights, term sums, nearest-bin lookup, cosine) is
written out plainly so the two paths can check each other.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .colorspace import Srgb8, ciede2000, lch_hue, srgb_to_lab
from .compositing import RenderOrder, region_color
from .naming import NameModel, SimilarityMeasure
from .objective import ObjectiveConfig, ScoreBreakdown, SeparabilityScale, Solution
from .scene import SceneStructure

__all__ = ["CandidateGrid", "InfeasibleGrid", "reference_score", "exhaustive_best"]


class InfeasibleGrid(RuntimeError):
    """No combination in the grid satisfies the hard constraints."""


@dataclass
class CandidateGrid:
    """Discrete design space: per-class color anchors, opacity levels, orders."""

    color_anchors: list[list[Srgb8]]
    opacity_levels: list[float]
    orders: list[tuple[int, ...]] | None = None
    cap: int = 10**7

    def __post_init__(self):
        if not self.color_anchors or any(not a for a in self.color_anchors):
            raise ValueError("every class needs at least one color anchor")
        if not self.opacity_levels:
            raise ValueError("at least one opacity level required")
        if self.combination_count() > self.cap:
            raise ValueError(
                f"grid has {self.combination_count()} combinations, cap is {self.cap}"
            )

    @property
    def m(self) -> int:
        return len(self.color_anchors)

    def order_choices(self) -> list[tuple[int, ...]]:
        if self.orders is not None:
            return [tuple(o) for o in self.orders]
        return [tuple(p) for p in itertools.permutations(range(self.m))]

    def combination_count(self) -> int:
        count = 1
        for anchors in self.color_anchors:
            count *= len(anchors)
        count *= len(self.opacity_levels) ** self.m
        count *= len(self.order_choices())
        return count


def _nearest_bin_exhaustive(model: NameModel, lab) -> int:
    best, best_d = 0, math.inf
    for k in range(model.bin_count):
        d = ciede2000(lab, tuple(model.bins[k]))
        if d < best_d:
            best, best_d = k, d
    return best


def _cosine(u, v) -> float:
    dot = sum(a * b for a, b in zip(u, v))
    nu = math.sqrt(sum(a * a for a in u))
    nv = math.sqrt(sum(b * b for b in v))
    return min(1.0, max(0.0, dot / (nu * nv)))


def _similarity(cfg: ObjectiveConfig, lab1, lab2, bin1: int | None, bin2: int | None) -> float:
    if cfg.similarity is SimilarityMeasure.NAME:
        if bin1 == bin2:
            return 1.0
        rows = cfg.name_model.counts
        return _cosine(rows[bin1].tolist(), rows[bin2].tolist())
    if cfg.similarity is SimilarityMeasure.COLOR:
        return min(1.0, max(0.0, 1.0 - ciede2000(lab1, lab2) / 100.0))
    if cfg.similarity is SimilarityMeasure.LUMINANCE:
        return min(1.0, max(0.0, 1.0 - 0.01 * abs(lab1[0] - lab2[0])))
    dh = abs(lch_hue(lab1) - lch_hue(lab2))
    if dh > 180.0:
        dh = 360.0 - dh
    return min(1.0, max(0.0, 1.0 - dh / 180.0))


def reference_score(scene: SceneStructure, sol: Solution, cfg: ObjectiveConfig) -> ScoreBreakdown:
    """Plain nested-loop evaluation of the full objective.

    No caching, no incremental updates, no shared scoring code: this is the
    ground truth the production evaluator is checked against.
    """
    if sol.m != scene.m:
        raise ValueError(f"solution has {sol.m} classes, scene has {scene.m}")
    notes: list[str] = []
    n, m = scene.n, scene.m

    srgbs = [
        region_color(
            r.signature, sol.palette, sol.opacities, sol.order, scene.background, cfg.blend_space
        )
        for r in scene.regions
    ]
    labs = [srgb_to_lab(c).as_tuple() for c in srgbs]

    # Shared-class counts recomputed from the membership matrix.
    member = scene.membership.tolist()
    share = [
        [sum(member[i][k] * member[j][k] for k in range(m)) for j in range(n)] for i in range(n)
    ]
    sizes = [float(s) for s in scene.sizes]

    bins = None
    if cfg.similarity is SimilarityMeasure.NAME:
        bins = [_nearest_bin_exhaustive(cfg.name_model, lab) for lab in labs]

    def sim(i: int, j: int) -> float:
        return _similarity(
            cfg, labs[i], labs[j], bins[i] if bins else None, bins[j] if bins else None
        )

    # Class difficulty weights.
    col_sums = [sum(member[j][c] for j in range(n)) for c in range(m)]
    max_col = max(col_sums)
    psi = []
    for c in range(m):
        b = scene.base_region_index[c]
        aggregate = sum(share[b][j] * sizes[j] for j in range(n))
        psi.append((col_sums[c] / max_col) * (1.0 - sizes[b] / aggregate))

    # Within-class association over (base region, composite region) pairs.
    singles = sum(1 for r in scene.regions if len(r.signature) == 1)
    acc = 0.0
    denom = 0
    min_s = math.inf
    for c in range(m):
        b = scene.base_region_index[c]
        for j in range(singles, n):
            if j == b:
                continue
            w = share[b][j]
            denom += w
            if w > 0:
                s = sim(b, j)
                acc += math.sqrt(psi[c]) * w * s
                min_s = min(min_s, s)
    if math.isinf(min_s):
        association = 1.0
        notes.append("no overlapping regions: association is vacuous (0 + 1)")
    else:
        association = acc / denom + min_s

    # Between-class disassociation over disjoint region pairs.
    disjoint_vals = []
    for i in range(n):
        for j in range(i + 1, n):
            if share[i][j] == 0:
                disjoint_vals.append(sim(i, j))
    if disjoint_vals:
        disassociation = sum(disjoint_vals) / len(disjoint_vals) + max(disjoint_vals)
    else:
        disassociation = 0.0
        notes.append("no disjoint region pairs: disassociation is vacuous (0)")

    # Color separability over the neighborhood graph, both directions.
    scale = 100.0 if cfg.separability_scale is SeparabilityScale.NORMALIZED else 1.0
    separability = math.inf
    for a, b in scene.adjacency:
        d = ciede2000(labs[a], labs[b])
        separability = min(separability, d / scale * (1.0 + sizes[a]))
        separability = min(separability, d / scale * (1.0 + sizes[b]))
    if math.isinf(separability):
        separability = 100.0 / scale
        notes.append("no neighboring regions: separability is vacuous (ceiling)")

    # Hard constraints.
    feasible = True
    for i in range(n):
        for j in range(i + 1, n):
            if ciede2000(labs[i], labs[j]) <= cfg.jnd_threshold:
                feasible = False
    bg = srgb_to_lab(scene.background).as_tuple()
    for lab in labs:
        if abs(lab[0] - bg[0]) < cfg.bg_contrast_min:
            feasible = False

    w1, w2, w3 = cfg.weights
    total = w1 * association - w2 * disassociation + w3 * separability
    return ScoreBreakdown(
        association=association,
        disassociation=disassociation,
        separability=separability,
        total=total,
        feasible=feasible,
        region_colors=[(c, srgb_to_lab(c)) for c in srgbs],
        notes=notes,
    )


def exhaustive_best(
    scene: SceneStructure, grid: CandidateGrid, cfg: ObjectiveConfig
) -> tuple[Solution, float]:
    """Enumerate the grid, keep the best feasible combination.

    Ties resolve to the first combination in enumeration order (palette
    assignments, then opacities, then orders, all in index order).
    """
    if grid.m != scene.m:
        raise ValueError(f"grid has {grid.m} classes, scene has {scene.m}")
    best: tuple[Solution, float] | None = None
    for palette in itertools.product(*grid.color_anchors):
        for opacities in itertools.product(grid.opacity_levels, repeat=grid.m):
            for order in grid.order_choices():
                sol = Solution(palette=palette, opacities=opacities, order=RenderOrder(order))
                bd = reference_score(scene, sol, cfg)
                if not bd.feasible:
                    continue
                if best is None or bd.total > best[1]:
                    best = (sol, bd.total)
    if best is None:
        raise InfeasibleGrid("no feasible combination in the candidate grid")
    return best
