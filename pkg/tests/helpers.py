"""Independent reference implementations used as test oracles.

Everything here is deliberately written from scratch (scalar math, no
engine imports beyond plain data types) so tests cross-check rather than
mirror the production code.
"""

from __future__ import annotations

import random

import numpy as np

from overglaze.scene import HistogramSpec


def decode_u8(v: int, space: str) -> float:
    x = v / 255.0
    if space == "gamma":
        return x
    return x / 12.92 if x <= 0.04045 else ((x + 0.055) / 1.055) ** 2.4


def encode_unit(v: float, space: str) -> float:
    if space == "gamma":
        return v
    return v * 12.92 if v <= 0.0031308 else 1.055 * v ** (1.0 / 2.4) - 0.055


def compose_pixel(stack, background, space="linear") -> tuple[int, int, int]:
    """Composite (rgb8, alpha) layers bottom-to-top over an opaque background."""
    acc = [decode_u8(c, space) for c in background]
    for rgb, alpha in stack:
        src = [decode_u8(c, space) for c in rgb]
        acc = [alpha * s + (1.0 - alpha) * d for s, d in zip(src, acc)]
    return tuple(int(encode_unit(min(1.0, max(0.0, v)), space) * 255.0 + 0.5) for v in acc)


def spec_to_masks(spec: HistogramSpec, width: int = 800, height: int = 600) -> np.ndarray:
    """Rasterize histogram bars to per-class boolean masks (pixel centers)."""
    edges = np.asarray(spec.bin_edges, dtype=float)
    heights = np.asarray(spec.heights, dtype=float)
    max_h = heights.max()
    xs = edges[0] + (np.arange(width) + 0.5) / width * (edges[-1] - edges[0])
    bin_idx = np.clip(np.searchsorted(edges, xs, side="right") - 1, 0, len(edges) - 2)
    ys = (np.arange(height) + 0.5) / height * max_h
    masks = np.empty((spec.m, height, width), dtype=bool)
    for c in range(spec.m):
        masks[c] = heights[c][bin_idx][None, :] > ys[:, None]
    return masks


def random_histogram_spec(rng: random.Random, m: int | None = None) -> HistogramSpec:
    """Random valid spec; every class gets one bin where it is the sole cover."""
    m = m if m is not None else rng.randint(1, 4)
    extra_bins = rng.randint(1, 4)
    nbins = m + extra_bins
    heights = [[0.0] * nbins for _ in range(m)]
    # One exclusive bin per class keeps the spec valid by construction.
    for c in range(m):
        heights[c][c] = rng.randint(1, 8) * 0.5
    for b in range(m, nbins):
        for c in range(m):
            if rng.random() < 0.7:
                heights[c][b] = rng.randint(0, 8) * 0.5
    return HistogramSpec(
        class_labels=[f"class {i}" for i in range(m)],
        bin_edges=[float(i) for i in range(nbins + 1)],
        heights=heights,
    )


def random_no_overlap_spec(rng: random.Random, m: int | None = None) -> HistogramSpec:
    """Classes on disjoint bins, separated by empty bins (no adjacency)."""
    m = m if m is not None else rng.randint(1, 4)
    nbins = 2 * m
    heights = [[0.0] * nbins for _ in range(m)]
    for c in range(m):
        heights[c][2 * c] = rng.randint(1, 6) * 0.5
    return HistogramSpec(
        class_labels=[f"class {i}" for i in range(m)],
        bin_edges=[float(i) for i in range(nbins + 1)],
        heights=heights,
    )
