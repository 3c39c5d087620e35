"""Color-name model: term-count matrix lookups and similarity measures.

A name model maps any Lab color to the term-count row of its nearest color
bin; similarity between two colors is the cosine of their term rows.
Alternative similarity measures (raw color distance, luminance, hue) are
provided for comparison runs.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .colorspace import (
    LabColor,
    ciede2000,
    ciede2000_pairs,
    lch_hue,
    luminance_diff,
    srgb_array_to_lab,
)

__all__ = [
    "FORMAT_TAG",
    "NameModel",
    "NameModelError",
    "SimilarityMeasure",
    "load_name_model",
    "serialize_name_model",
    "model_fingerprint",
    "nearest_bin",
    "name_vector",
    "name_similarity",
    "alt_similarity",
    "convert_survey_export",
    "synthetic_name_model",
]

FORMAT_TAG = "name-model/1"

# Soft cap on memoized nearest-bin lookups; cleared when exceeded.
_NEAREST_CACHE_CAP = 1 << 18


class NameModelError(ValueError):
    """Raised for malformed or invalid name-model data."""


class SimilarityMeasure(str, Enum):
    NAME = "name"
    COLOR = "color"
    LUMINANCE = "luminance"
    HUE = "hue"


@dataclass
class NameModel:
    """Color-term count matrix over a binned Lab color universe.

    `bins` is a (K, 3) array of Lab bin centers, `terms` the list of name
    strings, and `counts` the (K, T) non-negative count matrix. Immutable
    after construction; lookup caches are internal.
    """

    bins: np.ndarray
    terms: list[str]
    counts: np.ndarray
    _row_norms: np.ndarray = field(init=False, repr=False)
    _nearest_cache: dict = field(init=False, repr=False, default_factory=dict)
    _cos_cache: dict = field(init=False, repr=False, default_factory=dict)

    def __post_init__(self):
        self.bins = np.ascontiguousarray(np.asarray(self.bins, dtype=np.float64))
        self.counts = np.ascontiguousarray(np.asarray(self.counts, dtype=np.float64))
        _validate_model(self.bins, self.terms, self.counts)
        self.bins.flags.writeable = False
        self.counts.flags.writeable = False
        self._row_norms = np.linalg.norm(self.counts, axis=1)

    @property
    def bin_count(self) -> int:
        return self.bins.shape[0]

    @property
    def term_count(self) -> int:
        return len(self.terms)


def _validate_model(bins: np.ndarray, terms, counts: np.ndarray):
    if bins.ndim != 2 or bins.shape[1] != 3 or bins.shape[0] == 0:
        raise NameModelError("model has no bins (expected a non-empty K x 3 Lab array)")
    if not np.isfinite(bins).all():
        raise NameModelError("bin centers must be finite Lab triples")
    if not terms:
        raise NameModelError("model has no terms")
    if counts.shape != (bins.shape[0], len(terms)):
        raise NameModelError(
            f"counts shape {counts.shape} does not match "
            f"{bins.shape[0]} bins x {len(terms)} terms"
        )
    if (counts < 0).any():
        b, t = np.argwhere(counts < 0)[0]
        raise NameModelError(f"counts[{b},{t}] is negative")
    if not np.equal(np.mod(counts, 1), 0).all():
        b, t = np.argwhere(np.mod(counts, 1) != 0)[0]
        raise NameModelError(f"counts[{b},{t}] is not an integer")
    zero_rows = np.flatnonzero(counts.sum(axis=1) == 0)
    if zero_rows.size:
        raise NameModelError(f"bin {zero_rows[0]} has no nonzero term counts")


def load_name_model(data: bytes | str) -> NameModel:
    """Parse a serialized name-model document.

    The document is JSON with three sections: `bins` (list of [L, a, b]
    triples), `terms` (list of strings), and `counts` (sparse triples
    [bin_index, term_index, count]).
    """
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise NameModelError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise NameModelError("top-level value must be an object")
    tag = doc.get("format")
    if tag != FORMAT_TAG:
        raise NameModelError(f"unsupported format tag {tag!r} (expected {FORMAT_TAG!r})")
    for section in ("bins", "terms", "counts"):
        if section not in doc:
            raise NameModelError(f"missing required section '{section}'")

    raw_bins = doc["bins"]
    if not isinstance(raw_bins, list) or not raw_bins:
        raise NameModelError("section 'bins' must be a non-empty list")
    for i, entry in enumerate(raw_bins):
        if not isinstance(entry, list) or len(entry) != 3:
            raise NameModelError(f"bins[{i}]: expected an [L, a, b] triple")
    bins = np.asarray(raw_bins, dtype=np.float64)

    terms = doc["terms"]
    if not isinstance(terms, list) or not all(isinstance(t, str) for t in terms):
        raise NameModelError("section 'terms' must be a list of strings")

    counts = np.zeros((len(raw_bins), len(terms)))
    for i, triple in enumerate(doc["counts"]):
        if not isinstance(triple, list) or len(triple) != 3:
            raise NameModelError(f"counts[{i}]: expected [bin_index, term_index, count]")
        b, t, c = triple
        if not isinstance(b, int) or not 0 <= b < len(raw_bins):
            raise NameModelError(
                f"counts[{i}]: bin index {b} out of range ({len(raw_bins)} bins)"
            )
        if not isinstance(t, int) or not 0 <= t < len(terms):
            raise NameModelError(
                f"counts[{i}]: term index {t} out of range ({len(terms)} terms)"
            )
        counts[b, t] = c
    return NameModel(bins=bins, terms=list(terms), counts=counts)


def serialize_name_model(model: NameModel) -> str:
    """Canonical JSON serialization (stable bytes for identical models)."""
    b_idx, t_idx = np.nonzero(model.counts)
    triples = [
        [int(b), int(t), int(model.counts[b, t])] for b, t in zip(b_idx, t_idx)
    ]
    doc = {
        "format": FORMAT_TAG,
        "bins": [[float(v) for v in row] for row in model.bins],
        "terms": model.terms,
        "counts": triples,
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def model_fingerprint(model: NameModel) -> str:
    """Short content hash identifying a model in reports and documents."""
    return hashlib.sha256(serialize_name_model(model).encode()).hexdigest()[:12]


def nearest_bin(model: NameModel, c) -> int:
    """Index of the bin center nearest to `c` under CIEDE2000.

    Ties resolve to the lowest bin index. Results are memoized per model.
    """
    lab = c.as_tuple() if isinstance(c, LabColor) else (float(c[0]), float(c[1]), float(c[2]))
    cached = model._nearest_cache.get(lab)
    if cached is not None:
        return cached
    query = np.broadcast_to(np.asarray(lab), model.bins.shape)
    idx = int(np.argmin(ciede2000_pairs(query, model.bins)))
    if len(model._nearest_cache) > _NEAREST_CACHE_CAP:
        model._nearest_cache.clear()
    model._nearest_cache[lab] = idx
    return idx


def name_vector(model: NameModel, c) -> np.ndarray:
    """Term-count row for the bin nearest to `c` (unnormalized)."""
    return model.counts[nearest_bin(model, c)]


def similarity_by_bins(model: NameModel, bi: int, bj: int) -> float:
    """Cosine of two bin term rows; exactly 1.0 for the same bin."""
    if bi == bj:
        return 1.0
    key = (bi, bj) if bi < bj else (bj, bi)
    cached = model._cos_cache.get(key)
    if cached is not None:
        return cached
    value = float(model.counts[bi] @ model.counts[bj]) / float(
        model._row_norms[bi] * model._row_norms[bj]
    )
    value = min(1.0, max(0.0, value))
    model._cos_cache[key] = value
    return value


def name_similarity(model: NameModel, c1, c2) -> float:
    """Cosine name similarity between two colors, in [0, 1]."""
    return similarity_by_bins(model, nearest_bin(model, c1), nearest_bin(model, c2))


def alt_similarity(kind: SimilarityMeasure, c1, c2, model: NameModel | None = None) -> float:
    """Similarity between two Lab colors under the selected measure.

    COLOR is 1 - CIEDE2000/100 (clamped), LUMINANCE is 1 - 0.01*|dL|,
    HUE is 1 - dh/180 with the hue difference wrapped into [0, 180],
    NAME dispatches to the cosine name similarity.
    """
    kind = SimilarityMeasure(kind)
    if kind is SimilarityMeasure.NAME:
        if model is None:
            raise ValueError("NAME similarity requires a name model")
        return name_similarity(model, c1, c2)
    if kind is SimilarityMeasure.COLOR:
        return min(1.0, max(0.0, 1.0 - ciede2000(c1, c2) / 100.0))
    if kind is SimilarityMeasure.LUMINANCE:
        return min(1.0, max(0.0, 1.0 - 0.01 * luminance_diff(c1, c2)))
    dh = abs(lch_hue(c1) - lch_hue(c2))
    if dh > 180.0:
        dh = 360.0 - dh
    return min(1.0, max(0.0, 1.0 - dh / 180.0))


def convert_survey_export(raw: bytes | str | dict, drop_empty_bins: bool = True) -> NameModel:
    """Ingest a color-term survey export into a NameModel.

    Expected export layout: `color` is a flat list of Lab triples
    (L1, a1, b1, L2, ...), `terms` the term list, and `T` a flat list of
    (index, count) pairs where index = term_index * num_colors + color_index.
    """
    if not isinstance(raw, dict):
        try:
            raw = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise NameModelError(f"export is not valid JSON: {exc}") from exc
    for key in ("color", "terms", "T"):
        if key not in raw:
            raise NameModelError(f"export missing required key '{key}'")
    flat = raw["color"]
    if len(flat) % 3 != 0:
        raise NameModelError("export 'color' length is not a multiple of 3")
    k = len(flat) // 3
    if k == 0:
        raise NameModelError("export has no colors")
    bins = np.asarray(flat, dtype=np.float64).reshape(k, 3)
    terms = list(raw["terms"])
    flat_t = raw["T"]
    if len(flat_t) % 2 != 0:
        raise NameModelError("export 'T' length is not a multiple of 2")
    counts = np.zeros((k, len(terms)))
    for j in range(0, len(flat_t), 2):
        idx, cnt = int(flat_t[j]), flat_t[j + 1]
        term_i, color_i = divmod(idx, k)
        if term_i >= len(terms):
            raise NameModelError(f"export T[{j}]: index {idx} out of range")
        counts[color_i, term_i] = cnt
    if drop_empty_bins:
        keep = counts.sum(axis=1) > 0
        bins, counts = bins[keep], counts[keep]
    return NameModel(bins=bins, terms=terms, counts=counts)


# Prototype sRGB anchors for the built-in synthetic model. Chromatic terms
# get automatic tint/shade variants so a name covers its whole lightness
# family, the way survey respondents keep calling pale blue "blue".
_TERM_PROTOTYPES = [
    ("black", (20, 20, 20), False),
    ("white", (245, 245, 245), False),
    ("gray", (128, 128, 128), False),
    ("red", (220, 40, 40), True),
    ("orange", (255, 140, 0), True),
    ("yellow", (250, 220, 40), True),
    ("green", (50, 160, 60), True),
    ("teal", (0, 135, 135), True),
    ("cyan", (60, 200, 220), True),
    ("blue", (50, 80, 220), True),
    ("navy", (25, 30, 110), True),
    ("purple", (140, 70, 190), True),
    ("pink", (255, 150, 190), True),
    ("magenta", (210, 50, 160), True),
    ("brown", (140, 85, 30), True),
    ("olive", (128, 125, 40), True),
    ("tan", (205, 180, 140), True),
    ("maroon", (125, 30, 40), True),
]


def synthetic_name_model(steps: int = 6, margin: float = 8.0) -> NameModel:
    """Deterministic built-in model: an sRGB grid scored against name families.

    Each term owns a small family of prototypes (base color plus a tint and
    a shade for chromatic terms). A bin's distance to a term is its distance
    to the nearest family member; counts fall off with the margin by which a
    term loses to the best term, so name regions form wide plateaus with
    sharp boundaries. A self-contained stand-in when the survey dataset is
    not on hand; not a substitute for real naming data.
    """
    if steps < 2:
        raise ValueError("steps must be >= 2")
    levels = np.round(np.linspace(0.0, 255.0, steps))
    grid = np.array([(r, g, b) for r in levels for g in levels for b in levels])
    bins = srgb_array_to_lab(grid)

    terms = [name for name, _, _ in _TERM_PROTOTYPES]
    proto_rgbs: list[tuple[float, float, float]] = []
    proto_term: list[int] = []
    for t, (_, rgb, chromatic) in enumerate(_TERM_PROTOTYPES):
        family = [rgb]
        if chromatic:
            family.append(tuple(0.45 * v + 0.55 * 255.0 for v in rgb))  # tint
            family.append(tuple(0.55 * v for v in rgb))  # shade
        for member in family:
            proto_rgbs.append(member)
            proto_term.append(t)
    protos = srgb_array_to_lab(np.asarray(proto_rgbs, dtype=float))
    proto_term_arr = np.asarray(proto_term)

    counts = np.zeros((len(grid), len(terms)))
    for b in range(len(grid)):
        d = ciede2000_pairs(np.broadcast_to(bins[b], protos.shape), protos)
        d_term = np.array(
            [d[proto_term_arr == t].min() for t in range(len(terms))]
        )
        w = np.exp(-(((d_term - d_term.min()) / margin) ** 2))
        row = np.round(255.0 * w)
        row[int(np.argmin(d_term))] = max(row[int(np.argmin(d_term))], 1.0)
        counts[b] = row
    return NameModel(bins=bins, terms=terms, counts=counts)
