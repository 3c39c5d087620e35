"""Scene structure extraction for overlapped charts.

A scene reduces a chart to the data the objective needs: regions (grouped by
which classes cover them), the binary membership matrix, the pair-share
matrix, region sizes as fractions of the covered footprint, and a region
neighborhood graph. Two construction paths exist: analytic (bottom-aligned
histograms) and raster (per-class layer masks).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .colorspace import Srgb8

__all__ = [
    "HistogramSpec",
    "LayerMaskSet",
    "RegionInfo",
    "SceneStructure",
    "SceneError",
    "scene_from_histograms",
    "scene_from_masks",
    "validate_scene",
]

WHITE = Srgb8(255, 255, 255)

# Raster regions smaller than this fraction of the covered footprint are
# merged into their largest neighboring region (anti-aliasing slivers).
DEFAULT_MIN_REGION_FRACTION = 0.0005


class SceneError(ValueError):
    """Raised for inputs that cannot form a usable scene."""


@dataclass(frozen=True)
class RegionInfo:
    """One region: the set of covering classes, footprint share, and index."""

    id: int
    signature: tuple[int, ...]
    size: float


@dataclass
class HistogramSpec:
    """Bottom-aligned overlapped histograms: per-class bar heights over shared bins."""

    class_labels: list[str]
    bin_edges: list[float]
    heights: list[list[float]]

    def __post_init__(self):
        m = len(self.class_labels)
        if m == 0:
            raise SceneError("histogram spec needs at least one class")
        if len(self.heights) != m:
            raise SceneError(f"{m} class labels but {len(self.heights)} height rows")
        edges = np.asarray(self.bin_edges, dtype=np.float64)
        if edges.ndim != 1 or edges.size < 2:
            raise SceneError("bin_edges must list at least two edges")
        if not np.isfinite(edges).all() or not (np.diff(edges) > 0).all():
            raise SceneError("bin_edges must be finite and strictly increasing")
        nbins = edges.size - 1
        for c, row in enumerate(self.heights):
            h = np.asarray(row, dtype=np.float64)
            if h.shape != (nbins,):
                raise SceneError(f"class {c} has {h.size} heights for {nbins} bins")
            if not np.isfinite(h).all() or (h < 0).any():
                raise SceneError(f"class {c} heights must be finite and non-negative")
            if not (h > 0).any():
                raise SceneError(f"class {c} has no positive bar")

    @property
    def m(self) -> int:
        return len(self.class_labels)

    @property
    def bin_count(self) -> int:
        return len(self.bin_edges) - 1


@dataclass
class LayerMaskSet:
    """One binary coverage mask per class, all of identical size."""

    masks: np.ndarray  # (m, H, W) bool
    background: Srgb8 = WHITE
    class_labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.masks = np.asarray(self.masks, dtype=bool)
        if self.masks.ndim != 3 or self.masks.shape[0] == 0:
            raise SceneError("masks must be a non-empty (m, H, W) stack")
        if self.masks.shape[0] > 30:
            raise SceneError("at most 30 classes supported for raster scenes")
        if not self.class_labels:
            self.class_labels = [f"class {i}" for i in range(self.masks.shape[0])]
        if len(self.class_labels) != self.masks.shape[0]:
            raise SceneError("one label per mask required")

    @property
    def m(self) -> int:
        return self.masks.shape[0]


@dataclass
class SceneStructure:
    """Preprocessed chart structure consumed by the objective.

    Regions are signature-equivalence classes (all covered points sharing
    the same covering class set), ordered single-class base regions first.
    `membership` is the n x m binary matrix, `pair_share` its Gram matrix
    (shared-class counts), `sizes` the region footprint fractions, and
    `adjacency` the set of neighboring region index pairs (i < j).
    """

    m: int
    regions: list[RegionInfo]
    membership: np.ndarray
    pair_share: np.ndarray
    sizes: np.ndarray
    adjacency: frozenset[tuple[int, int]]
    background: Srgb8
    class_labels: list[str]
    base_region_index: list[int]
    warnings: list[str] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.regions)

    def neighbors(self, i: int) -> list[int]:
        out = [b if a == i else a for a, b in self.adjacency if i in (a, b)]
        return sorted(out)


def _order_signatures(signatures) -> list[tuple[int, ...]]:
    singles = sorted(s for s in signatures if len(s) == 1)
    composites = sorted((s for s in signatures if len(s) > 1), key=lambda s: (len(s), s))
    return singles + composites


def _assemble_scene(
    m: int,
    areas: dict[tuple[int, ...], float],
    total_area: float,
    sig_adjacency: set[tuple[tuple[int, ...], tuple[int, ...]]],
    background: Srgb8,
    class_labels: list[str],
) -> SceneStructure:
    ordered = _order_signatures(areas)
    index_of = {sig: i for i, sig in enumerate(ordered)}
    n = len(ordered)

    membership = np.zeros((n, m), dtype=np.int64)
    for sig, i in index_of.items():
        membership[i, list(sig)] = 1
    pair_share = membership @ membership.T
    sizes = np.array([areas[sig] / total_area for sig in ordered])

    adjacency = set()
    for sa, sb in sig_adjacency:
        if sa == sb:
            continue
        a, b = index_of[sa], index_of[sb]
        adjacency.add((min(a, b), max(a, b)))

    warnings = []
    base_index = []
    for c in range(m):
        sig = (c,)
        if sig in index_of:
            base_index.append(index_of[sig])
            continue
        # No exclusive region: fall back to the smallest-signature region
        # containing the class.
        candidates = [i for i, s in enumerate(ordered) if c in s]
        candidates.sort(key=lambda i: (len(ordered[i]), ordered[i]))
        base_index.append(candidates[0])
        warnings.append(
            f"class {class_labels[c]!r} has no exclusive region; using region "
            f"{candidates[0]} {ordered[candidates[0]]} as its base"
        )

    regions = [RegionInfo(id=i, signature=sig, size=float(sizes[i])) for i, sig in enumerate(ordered)]
    return SceneStructure(
        m=m,
        regions=regions,
        membership=membership,
        pair_share=pair_share,
        sizes=sizes,
        adjacency=frozenset(adjacency),
        background=background,
        class_labels=list(class_labels),
        base_region_index=base_index,
        warnings=warnings,
    )


def scene_from_histograms(spec: HistogramSpec, background: Srgb8 = WHITE) -> SceneStructure:
    """Build a scene from bottom-aligned overlapped histograms.

    Within each bin the sorted bar heights partition the vertical extent
    into intervals; every interval contributes its area to the region whose
    signature is the set of classes reaching at least that high. Neighbor
    relations require a shared edge of positive length (vertically stacked
    intervals within a bin, or vertically overlapping intervals across a
    bin boundary); corner-only contact does not count.
    """
    edges = np.asarray(spec.bin_edges, dtype=np.float64)
    heights = np.asarray(spec.heights, dtype=np.float64)
    m, nbins = heights.shape

    areas: dict[tuple[int, ...], float] = {}
    total_area = 0.0
    # Per-bin interval stacks: (lo, hi, signature), bottom to top.
    columns: list[list[tuple[float, float, tuple[int, ...]]]] = []
    for b in range(nbins):
        width = float(edges[b + 1] - edges[b])
        col_heights = heights[:, b]
        intervals: list[tuple[float, float, tuple[int, ...]]] = []
        prev = 0.0
        for level in sorted(set(col_heights[col_heights > 0].tolist())):
            sig = tuple(np.flatnonzero(col_heights >= level).tolist())
            intervals.append((prev, level, sig))
            areas[sig] = areas.get(sig, 0.0) + (level - prev) * width
            prev = level
        total_area += prev * width
        columns.append(intervals)

    if total_area <= 0.0:
        raise SceneError("histogram has no covered area")

    sig_adjacency: set[tuple[tuple[int, ...], tuple[int, ...]]] = set()
    for col in columns:
        for (_, _, below), (_, _, above) in zip(col, col[1:]):
            sig_adjacency.add((below, above))
    for left, right in zip(columns, columns[1:]):
        for lo1, hi1, sig1 in left:
            for lo2, hi2, sig2 in right:
                if min(hi1, hi2) - max(lo1, lo2) > 0.0:
                    sig_adjacency.add((sig1, sig2))

    return _assemble_scene(m, areas, total_area, sig_adjacency, background, spec.class_labels)


def scene_from_masks(
    masks: LayerMaskSet,
    min_region_fraction: float = DEFAULT_MIN_REGION_FRACTION,
) -> SceneStructure:
    """Build a scene from per-class raster masks (screen-space path).

    Every covered pixel's signature is the set of masks covering it;
    signature groups become regions sized by pixel share of the covered
    footprint. Adjacency uses 4-connectivity between pixels of differing
    signatures. Signatures below `min_region_fraction` of the footprint
    are merged into their largest 4-connected neighbor.
    """
    m = masks.m
    stack = masks.masks
    code = np.zeros(stack.shape[1:], dtype=np.int64)
    for i in range(m):
        code |= stack[i].astype(np.int64) << i

    covered = code > 0
    total = int(covered.sum())
    if total == 0:
        raise SceneError("all masks are empty")

    values, counts = np.unique(code[covered], return_counts=True)
    pixel_count = {int(v): int(c) for v, c in zip(values, counts)}

    # Directed boundary contacts between different nonzero codes.
    contact: dict[tuple[int, int], int] = {}

    def _tally(a: np.ndarray, b: np.ndarray):
        sel = (a > 0) & (b > 0) & (a != b)
        if not sel.any():
            return
        lo = np.minimum(a[sel], b[sel])
        hi = np.maximum(a[sel], b[sel])
        pairs, cnts = np.unique(lo << 32 | hi, return_counts=True)
        for p, c in zip(pairs, cnts):
            key = (int(p >> 32), int(p & 0xFFFFFFFF))
            contact[key] = contact.get(key, 0) + int(c)

    _tally(code[:, :-1], code[:, 1:])
    _tally(code[:-1, :], code[1:, :])

    # Merge sliver signatures into their biggest touching neighbor. A sliver
    # survives if it is the last region representing one of its classes.
    threshold = min_region_fraction * total

    def _class_preserved(v: int) -> bool:
        for i in range(m):
            if v >> i & 1 and not any(
                u != v and u >> i & 1 for u in pixel_count
            ):
                return False
        return True

    merged_notes = []
    while True:
        tiny = sorted(
            (v for v, c in pixel_count.items() if c < threshold and _class_preserved(v)),
            key=lambda v: (pixel_count[v], v),
        )
        merged = False
        for v in tiny:
            neigh = {}
            for (a, b), c in contact.items():
                if a == v and b in pixel_count:
                    neigh[b] = neigh.get(b, 0) + c
                elif b == v and a in pixel_count:
                    neigh[a] = neigh.get(a, 0) + c
            if not neigh:
                continue  # isolated sliver; keep it rather than lose coverage
            target = max(neigh, key=lambda t: (pixel_count[t], t))
            pixel_count[target] += pixel_count.pop(v)
            remap = {}
            for (a, b), c in list(contact.items()):
                if v in (a, b):
                    del contact[(a, b)]
                    other = b if a == v else a
                    if other in (v, target):
                        continue
                    key = (min(other, target), max(other, target))
                    remap[key] = remap.get(key, 0) + c
            for key, c in remap.items():
                contact[key] = contact.get(key, 0) + c
            merged_notes.append(f"merged sliver signature {v:#x} into {target:#x}")
            merged = True
            break
        if not merged:
            break

    def _sig(v: int) -> tuple[int, ...]:
        return tuple(i for i in range(m) if v >> i & 1)

    areas = {_sig(v): float(c) for v, c in pixel_count.items()}
    sig_adjacency = {
        (_sig(a), _sig(b)) for (a, b) in contact if a in pixel_count and b in pixel_count
    }
    scene = _assemble_scene(
        m, areas, float(total), sig_adjacency, masks.background, masks.class_labels
    )
    scene.warnings.extend(merged_notes)
    return scene


@dataclass
class SceneValidationReport:
    violations: list[str]
    warnings: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_scene(scene: SceneStructure, atol: float = 1e-9) -> SceneValidationReport:
    """Check all structural invariants of a scene; list any violations."""
    v: list[str] = []
    n, m = scene.n, scene.m

    if scene.membership.shape != (n, m):
        v.append(f"membership shape {scene.membership.shape} != ({n}, {m})")
    else:
        if not np.isin(scene.membership, (0, 1)).all():
            v.append("membership matrix must be binary")
        recomputed = scene.membership @ scene.membership.T
        if scene.pair_share.shape != (n, n):
            v.append(f"pair_share shape {scene.pair_share.shape} != ({n}, {n})")
        elif not np.array_equal(recomputed, scene.pair_share):
            v.append("pair_share differs from membership @ membership.T")
        for i, region in enumerate(scene.regions):
            row = tuple(np.flatnonzero(scene.membership[i]).tolist())
            if row != region.signature:
                v.append(f"region {i}: membership row {row} != signature {region.signature}")

    singles = sum(1 for r in scene.regions if len(r.signature) == 1)
    for i in range(singles):
        if len(scene.regions[i].signature) != 1:
            v.append(f"region {i} should be a single-class base region")
    for i, r in enumerate(scene.regions):
        if not r.signature:
            v.append(f"region {i} has an empty signature")
        if r.size <= 0:
            v.append(f"region {i} has non-positive size {r.size}")
        if abs(r.size - scene.sizes[i]) > atol:
            v.append(f"region {i} size mismatch between regions list and sizes vector")
    if scene.sizes.sum() > 1.0 + atol:
        v.append(f"sizes sum to {scene.sizes.sum()} > 1")

    for a, b in scene.adjacency:
        if a == b:
            v.append(f"self-adjacency on region {a}")
        if not (0 <= a < n and 0 <= b < n):
            v.append(f"adjacency pair ({a}, {b}) out of range")

    if len(scene.base_region_index) != m:
        v.append("base_region_index must map every class")
    else:
        for c, i in enumerate(scene.base_region_index):
            if not 0 <= i < n or c not in scene.regions[i].signature:
                v.append(f"class {c} base region {i} does not contain the class")

    return SceneValidationReport(violations=v, warnings=list(scene.warnings))
