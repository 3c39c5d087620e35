"""Porter-Duff "over" compositing and region color resolution.

Blending happens in linear-light RGB by default; a gamma-space mode matches
plotting libraries that composite on encoded values directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .colorspace import LinearRgb, Srgb8, _decode_channel, _encode_channel

__all__ = [
    "BlendSpace",
    "Rgba",
    "RenderOrder",
    "over",
    "region_color",
]


class BlendSpace(str, Enum):
    LINEAR = "linear"
    GAMMA = "gamma"


@dataclass(frozen=True)
class Rgba:
    """A color with coverage alpha; channel values live in [0, 1]."""

    color: LinearRgb
    alpha: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha {self.alpha} outside [0, 1]")


@dataclass(frozen=True)
class RenderOrder:
    """Bottom-to-top drawing order of class layers: a permutation of 0..m-1."""

    order: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(int(i) for i in self.order))
        if sorted(self.order) != list(range(len(self.order))):
            raise ValueError(f"{self.order} is not a permutation of 0..{len(self.order) - 1}")

    def __len__(self) -> int:
        return len(self.order)

    def __iter__(self):
        return iter(self.order)


def _over_channels(
    src: tuple[float, float, float],
    sa: float,
    dst: tuple[float, float, float],
    da: float,
) -> tuple[tuple[float, float, float], float]:
    # Exact algebraic consequences of the formula; avoids multiply/divide
    # round-off on the identity cases.
    if sa == 0.0:
        if da == 0.0:
            return (0.0, 0.0, 0.0), 0.0
        return dst, da
    if sa == 1.0:
        return src, 1.0
    return (
        tuple((sa * s + da * d * (1.0 - sa)) / (sa + da * (1.0 - sa)) for s, d in zip(src, dst)),
        sa + da * (1.0 - sa),
    )


def over(src: Rgba, dst: Rgba) -> Rgba:
    """Composite `src` over `dst`:

        a' = a_s + a_d (1 - a_s)
        c' = (a_s c_s + a_d c_d (1 - a_s)) / a'

    Returns transparent black when the combined alpha is zero.
    """
    rgb, alpha = _over_channels(src.color.as_tuple(), src.alpha, dst.color.as_tuple(), dst.alpha)
    return Rgba(LinearRgb(*rgb), alpha)


def _to_blend_floats(c: Srgb8, space: BlendSpace) -> tuple[float, float, float]:
    enc = (c.r / 255.0, c.g / 255.0, c.b / 255.0)
    if space is BlendSpace.GAMMA:
        return enc
    return tuple(_decode_channel(v) for v in enc)


def _from_blend_floats(rgb: Sequence[float], space: BlendSpace) -> Srgb8:
    out = []
    for v in rgb:
        v = min(1.0, max(0.0, v))
        if space is BlendSpace.LINEAR:
            v = _encode_channel(v)
        out.append(int(v * 255.0 + 0.5))
    return Srgb8(*out)


def region_color(
    signature: Iterable[int],
    palette: Sequence[Srgb8],
    opacities: Sequence[float],
    order: RenderOrder,
    background: Srgb8,
    blend_space: BlendSpace = BlendSpace.LINEAR,
) -> Srgb8:
    """Resolve the displayed color of a region covered by `signature` classes.

    Starts from the opaque background and applies `over` for each class in
    the signature, bottom-to-top per the rendering order. The result is
    always opaque and is re-encoded to 8-bit sRGB.
    """
    sig = frozenset(int(i) for i in signature)
    if not sig:
        raise ValueError("region signature must name at least one class")
    m = len(palette)
    if len(opacities) != m or len(order) != m:
        raise ValueError(
            f"palette ({m}), opacities ({len(opacities)}) and order "
            f"({len(order)}) must describe the same class count"
        )
    if any(i < 0 or i >= m for i in sig):
        raise ValueError(f"signature {sorted(sig)} references classes outside 0..{m - 1}")

    acc = _to_blend_floats(background, blend_space)
    acc_a = 1.0
    for cls in order:
        if cls not in sig:
            continue
        src = _to_blend_floats(palette[cls], blend_space)
        acc, acc_a = _over_channels(src, float(opacities[cls]), acc, acc_a)
    # Opaque backdrop keeps alpha pinned at 1.
    assert acc_a == 1.0
    return _from_blend_floats(acc, blend_space)
