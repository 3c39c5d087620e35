"""Study-stimulus generation: overlapped Gaussian histograms with a
controlled roughness level, graded by KL divergence from the ideal shape."""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .scene import HistogramSpec

__all__ = [
    "Smoothness",
    "KL_BANDS",
    "StimulusParams",
    "GeneratedStimulus",
    "GenerationFailed",
    "kl_divergence",
    "gen_stimulus",
]


class Smoothness(str, Enum):
    SMOOTH = "smooth"
    MODERATE = "moderate"
    UNSMOOTH = "unsmooth"


# Target KL bands per smoothness level; SMOOTH is exactly zero.
KL_BANDS: dict[Smoothness, tuple[float, float]] = {
    Smoothness.SMOOTH: (0.0, 0.0),
    Smoothness.MODERATE: (0.02, 0.04),
    Smoothness.UNSMOOTH: (0.07, 0.1),
}

KL_SMOOTHING = 1e-9


class GenerationFailed(RuntimeError):
    """The target KL band was not reached within the attempt budget."""


@dataclass
class StimulusParams:
    classes: int
    smoothness: Smoothness
    bins: int = 25
    seed: int = 0

    def __post_init__(self):
        if self.classes not in (2, 3, 4):
            raise ValueError("classes must be 2, 3, or 4")
        self.smoothness = Smoothness(self.smoothness)
        if self.bins < 5:
            raise ValueError("need at least 5 bins")


@dataclass
class GeneratedStimulus:
    """A generated histogram spec plus its per-class generation record."""

    spec: HistogramSpec
    ideal_heights: np.ndarray  # (m, bins) unperturbed Gaussian heights
    kl: list[float]
    sigmas: list[float]
    amplitudes: list[float]
    means: list[float]


def kl_divergence(p, q, smoothing: float = KL_SMOOTHING) -> float:
    """KL divergence between two non-negative weight vectors.

    Both are smoothed additively and normalized to probability mass first.
    """
    p = np.asarray(p, dtype=np.float64) + smoothing
    q = np.asarray(q, dtype=np.float64) + smoothing
    p = p / p.sum()
    q = q / q.sum()
    return float(np.sum(p * np.log(p / q)))


def _perturb_to_band(
    ideal: np.ndarray,
    band: tuple[float, float],
    rng: random.Random,
    max_attempts: int,
) -> tuple[np.ndarray, float]:
    """Multiplicative bin noise with adaptive amplitude until KL lands in band."""
    lo, hi = band
    amplitude = 0.05
    for _ in range(max_attempts):
        noise = np.array([1.0 + amplitude * rng.uniform(-1.0, 1.0) for _ in ideal])
        heights = np.clip(ideal * noise, 0.0, None)
        heights *= ideal.sum() / heights.sum()
        kl = kl_divergence(heights, ideal)
        if lo <= kl <= hi:
            return heights, kl
        # Monotone amplitude control: more noise raises KL.
        if kl < lo:
            amplitude = min(1.0, amplitude * 1.25)
        else:
            amplitude = max(1e-4, amplitude * 0.8)
    raise GenerationFailed(
        f"could not reach KL band [{lo}, {hi}] within {max_attempts} attempts"
    )


def _has_exclusive_bin(heights: np.ndarray, c: int) -> bool:
    others = np.delete(heights, c, axis=0)
    return bool((heights[c] > others.max(axis=0)).any()) if len(heights) > 1 else True


def gen_stimulus(params: StimulusParams, max_attempts: int = 10_000) -> GeneratedStimulus:
    """Generate one overlapped-histogram stimulus.

    Each class samples a Gaussian with random spread (sigma in [3, 5]) and
    scale (in [0.8, 1.2]) over the bin grid, then receives multiplicative
    perturbations until the KL divergence from the ideal shape falls in the
    smoothness band. Classes are redrawn if any one of them ends up without
    a bin where it is the strict maximum (no exclusive region).
    """
    rng = random.Random(params.seed)
    band = KL_BANDS[params.smoothness]
    centers = np.arange(params.bins) + 0.5

    for _ in range(100):
        sigmas, amps, means = [], [], []
        ideal = np.empty((params.classes, params.bins))
        heights = np.empty_like(ideal)
        kls: list[float] = []
        for c in range(params.classes):
            sigma = rng.uniform(3.0, 5.0)
            amp = rng.uniform(0.8, 1.2)
            mean = rng.uniform(0.3 * params.bins, 0.7 * params.bins)
            sigmas.append(sigma)
            amps.append(amp)
            means.append(mean)
            ideal[c] = amp * np.exp(-((centers - mean) ** 2) / (2.0 * sigma**2))
            if params.smoothness is Smoothness.SMOOTH:
                heights[c] = ideal[c]
                kls.append(0.0)
            else:
                heights[c], kl = _perturb_to_band(ideal[c], band, rng, max_attempts)
                kls.append(kl)
        if all(_has_exclusive_bin(heights, c) for c in range(params.classes)):
            spec = HistogramSpec(
                class_labels=[f"class {chr(ord('A') + c)}" for c in range(params.classes)],
                bin_edges=[float(i) for i in range(params.bins + 1)],
                heights=[[float(v) for v in row] for row in heights],
            )
            return GeneratedStimulus(
                spec=spec,
                ideal_heights=ideal,
                kl=kls,
                sigmas=sigmas,
                amplitudes=amps,
                means=means,
            )
    raise GenerationFailed("could not draw classes with exclusive regions")
