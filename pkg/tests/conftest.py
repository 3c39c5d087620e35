import numpy as np
import pytest

from overglaze.colorspace import LabColor, Srgb8
from overglaze.naming import NameModel, synthetic_name_model
from overglaze.scene import HistogramSpec, scene_from_histograms

# Term order shared by the hand-authored fixture model.
FIXTURE_TERMS = [
    "red", "green", "blue", "yellow", "orange", "purple", "white", "black", "gray",
]

FIXTURE_BINS = {
    "red": (54.0, 81.0, 70.0),
    "green": (88.0, -79.0, 81.0),
    "blue": (30.0, 68.0, -112.0),
    "yellow": (98.0, -16.0, 93.0),
    "orange": (67.0, 43.0, 74.0),
    "purple": (40.0, 60.0, -60.0),
    "white": (100.0, 0.0, 0.0),
    "black": (0.0, 0.0, 0.0),
    "gray": (53.0, 0.0, 0.0),
}

FIXTURE_COUNTS = {
    "red":    [90, 0, 0, 0, 10, 0, 0, 0, 2],
    "green":  [0, 95, 0, 5, 0, 0, 0, 0, 2],
    "blue":   [0, 0, 90, 0, 0, 10, 0, 0, 2],
    "yellow": [0, 5, 0, 85, 10, 0, 0, 0, 2],
    "orange": [15, 0, 0, 5, 80, 0, 0, 0, 2],
    "purple": [0, 0, 15, 0, 0, 85, 0, 0, 2],
    "white":  [0, 0, 0, 0, 0, 0, 99, 0, 5],
    "black":  [0, 0, 0, 0, 0, 0, 0, 99, 5],
    "gray":   [1, 1, 1, 1, 1, 1, 5, 5, 90],
}

FIXTURE_BIN_ORDER = list(FIXTURE_BINS)


@pytest.fixture(scope="session")
def fixture_model() -> NameModel:
    """Small hand-authored name model: 9 bins, 9 terms."""
    return NameModel(
        bins=np.array([FIXTURE_BINS[name] for name in FIXTURE_BIN_ORDER]),
        terms=list(FIXTURE_TERMS),
        counts=np.array([FIXTURE_COUNTS[name] for name in FIXTURE_BIN_ORDER], dtype=float),
    )


@pytest.fixture(scope="session")
def builtin_model() -> NameModel:
    return synthetic_name_model()


def make_three_class_spec() -> HistogramSpec:
    """Three overlapped histograms producing exactly six regions:
    the three exclusive bases plus {A,B}, {B,C}, and {A,B,C} (never {A,C})."""
    return HistogramSpec(
        class_labels=["A", "B", "C"],
        bin_edges=[0, 1, 2, 3, 4, 5],
        heights=[
            [4, 4, 4, 0, 0],
            [0, 2, 3, 4, 0],
            [0, 0, 2, 2, 3],
        ],
    )


@pytest.fixture()
def three_class_spec() -> HistogramSpec:
    return make_three_class_spec()


@pytest.fixture()
def three_class_scene(three_class_spec):
    return scene_from_histograms(three_class_spec)


def fixture_lab(name: str) -> LabColor:
    return LabColor(*FIXTURE_BINS[name])


def region_colors_from_bins(names: list[str]):
    """Colors list (placeholder sRGB + exact bin-center Lab) for term tests."""
    return [(Srgb8(0, 0, 0), fixture_lab(n)) for n in names]
