"""sRGB / CIELAB conversion, CIEDE2000 distance, and LCh hue utilities.

All CIELAB values are relative to the D65 illuminant with the 2-degree
standard observer, matching sRGB display colorimetry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Srgb8",
    "LabColor",
    "LinearRgb",
    "srgb_to_linear",
    "linear_to_srgb",
    "srgb_to_lab",
    "linear_to_lab",
    "lab_to_srgb",
    "ciede2000",
    "ciede2000_pairs",
    "luminance_diff",
    "lch_hue",
    "srgb_array_to_lab",
]

# D65 reference white, 2-degree observer (Y normalized to 1).
D65_WHITE = (0.95047, 1.0, 1.08883)

_SRGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
# Exact inverse of the forward matrix keeps round-trips tight.
_XYZ_TO_SRGB = np.linalg.inv(_SRGB_TO_XYZ)

_LAB_EPS = (6.0 / 29.0) ** 3
_LAB_KAPPA = (29.0 / 6.0) ** 2 / 3.0  # 1 / (3 * (6/29)^2)
_POW25_7 = 25.0**7


@dataclass(frozen=True)
class Srgb8:
    """Gamma-encoded sRGB color with 8-bit integer channels."""

    r: int
    g: int
    b: int

    def __post_init__(self):
        for name in ("r", "g", "b"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool):
                raise ValueError(f"channel {name} must be an integer, got {v!r}")
            if not 0 <= v <= 255:
                raise ValueError(f"channel {name}={v} outside [0, 255]")

    def to_hex(self) -> str:
        return f"#{self.r:02x}{self.g:02x}{self.b:02x}"

    @classmethod
    def from_hex(cls, text: str) -> "Srgb8":
        s = text.strip().lstrip("#")
        if len(s) != 6:
            raise ValueError(f"expected #rrggbb hex color, got {text!r}")
        try:
            return cls(int(s[0:2], 16), int(s[2:4], 16), int(s[4:6], 16))
        except ValueError as exc:
            raise ValueError(f"expected #rrggbb hex color, got {text!r}") from exc

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.r, self.g, self.b)


@dataclass(frozen=True)
class LabColor:
    """CIELAB coordinates: L lightness in [0, 100], opponent axes a and b."""

    L: float
    a: float
    b: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.L, self.a, self.b)


@dataclass(frozen=True)
class LinearRgb:
    """Linear-light RGB in [0, 1] (values may exceed range mid-conversion)."""

    r: float
    g: float
    b: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.r, self.g, self.b)


def _decode_channel(v: float) -> float:
    if v <= 0.04045:
        return v / 12.92
    return ((v + 0.055) / 1.055) ** 2.4


def _encode_channel(v: float) -> float:
    if v <= 0.0031308:
        return v * 12.92
    return 1.055 * v ** (1.0 / 2.4) - 0.055


def srgb_to_linear(c: Srgb8) -> LinearRgb:
    """Decode gamma-encoded channels to linear light."""
    return LinearRgb(
        _decode_channel(c.r / 255.0),
        _decode_channel(c.g / 255.0),
        _decode_channel(c.b / 255.0),
    )


# Overshoot below this is rounding noise from the published matrix constants
# (about 2e-7 at the white point), not a real gamut violation.
_GAMUT_FUZZ = 1e-6


def linear_to_srgb(rgb: LinearRgb) -> tuple[Srgb8, bool]:
    """Encode linear RGB to 8-bit sRGB.

    Out-of-range channels are clamped to [0, 1] before encoding; the second
    return value reports whether any (more than round-off) clamping happened.
    """
    clamped = False
    out = []
    for v in rgb.as_tuple():
        if v < -_GAMUT_FUZZ or v > 1.0 + _GAMUT_FUZZ:
            clamped = True
        v = min(1.0, max(0.0, v))
        out.append(int(_encode_channel(v) * 255.0 + 0.5))
    return Srgb8(out[0], out[1], out[2]), clamped


def _xyz_to_lab(x: float, y: float, z: float) -> LabColor:
    def f(t: float) -> float:
        if t > _LAB_EPS:
            return t ** (1.0 / 3.0)
        return _LAB_KAPPA * t + 4.0 / 29.0

    fx = f(x / D65_WHITE[0])
    fy = f(y / D65_WHITE[1])
    fz = f(z / D65_WHITE[2])
    return LabColor(116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz))


def linear_to_lab(rgb: LinearRgb) -> LabColor:
    x, y, z = _SRGB_TO_XYZ @ np.asarray(rgb.as_tuple())
    return _xyz_to_lab(float(x), float(y), float(z))


def srgb_to_lab(c: Srgb8) -> LabColor:
    """Convert an 8-bit sRGB color to CIELAB (D65, 2-degree observer)."""
    return linear_to_lab(srgb_to_linear(c))


def lab_to_srgb(lab: LabColor) -> tuple[Srgb8, bool]:
    """Convert CIELAB back to 8-bit sRGB, clamping out-of-gamut channels.

    Returns the encoded color and a flag indicating whether clamping occurred.
    """
    fy = (lab.L + 16.0) / 116.0
    fx = fy + lab.a / 500.0
    fz = fy - lab.b / 200.0

    def finv(t: float) -> float:
        if t > 6.0 / 29.0:
            return t**3
        return (t - 4.0 / 29.0) / _LAB_KAPPA

    xyz = np.array(
        [
            finv(fx) * D65_WHITE[0],
            finv(fy) * D65_WHITE[1],
            finv(fz) * D65_WHITE[2],
        ]
    )
    r, g, b = _XYZ_TO_SRGB @ xyz
    return linear_to_srgb(LinearRgb(float(r), float(g), float(b)))


def srgb_array_to_lab(rgb: np.ndarray) -> np.ndarray:
    """Vectorized sRGB(0..255, shape (N, 3)) to Lab (shape (N, 3))."""
    v = np.asarray(rgb, dtype=np.float64) / 255.0
    lin = np.where(v <= 0.04045, v / 12.92, ((v + 0.055) / 1.055) ** 2.4)
    xyz = lin @ _SRGB_TO_XYZ.T
    xyz /= np.asarray(D65_WHITE)
    f = np.where(xyz > _LAB_EPS, np.cbrt(xyz), _LAB_KAPPA * xyz + 4.0 / 29.0)
    out = np.empty_like(f)
    out[:, 0] = 116.0 * f[:, 1] - 16.0
    out[:, 1] = 500.0 * (f[:, 0] - f[:, 1])
    out[:, 2] = 200.0 * (f[:, 1] - f[:, 2])
    return out


def _lab_tuple(x) -> tuple[float, float, float]:
    if isinstance(x, LabColor):
        return x.as_tuple()
    l, a, b = x
    return (float(l), float(a), float(b))


def ciede2000(x, y) -> float:
    """CIEDE2000 color difference between two Lab colors.

    Accepts LabColor instances or (L, a, b) sequences. Implements the
    Sharma/Wu/Dalal reference formulation with kL = kC = kH = 1.
    """
    l1, a1, b1 = _lab_tuple(x)
    l2, a2, b2 = _lab_tuple(y)

    c1 = math.hypot(a1, b1)
    c2 = math.hypot(a2, b2)
    cbar = 0.5 * (c1 + c2)
    cbar7 = cbar**7
    g = 0.5 * (1.0 - math.sqrt(cbar7 / (cbar7 + _POW25_7)))
    ap1 = (1.0 + g) * a1
    ap2 = (1.0 + g) * a2
    cp1 = math.hypot(ap1, b1)
    cp2 = math.hypot(ap2, b2)

    hp1 = math.degrees(math.atan2(b1, ap1)) % 360.0 if (ap1 != 0.0 or b1 != 0.0) else 0.0
    hp2 = math.degrees(math.atan2(b2, ap2)) % 360.0 if (ap2 != 0.0 or b2 != 0.0) else 0.0

    dlp = l2 - l1
    dcp = cp2 - cp1

    cc = cp1 * cp2
    if cc == 0.0:
        dhp = 0.0
    else:
        dhp = hp2 - hp1
        if dhp > 180.0:
            dhp -= 360.0
        elif dhp < -180.0:
            dhp += 360.0
    dHp = 2.0 * math.sqrt(cc) * math.sin(math.radians(dhp) / 2.0)

    lbar = 0.5 * (l1 + l2)
    cpbar = 0.5 * (cp1 + cp2)
    if cc == 0.0:
        hbar = hp1 + hp2
    else:
        hbar = 0.5 * (hp1 + hp2)
        if abs(hp1 - hp2) > 180.0:
            if hp1 + hp2 < 360.0:
                hbar += 180.0
            else:
                hbar -= 180.0

    t = (
        1.0
        - 0.17 * math.cos(math.radians(hbar - 30.0))
        + 0.24 * math.cos(math.radians(2.0 * hbar))
        + 0.32 * math.cos(math.radians(3.0 * hbar + 6.0))
        - 0.20 * math.cos(math.radians(4.0 * hbar - 63.0))
    )
    dtheta = 30.0 * math.exp(-(((hbar - 275.0) / 25.0) ** 2))
    cpbar7 = cpbar**7
    rc = 2.0 * math.sqrt(cpbar7 / (cpbar7 + _POW25_7))
    lm50sq = (lbar - 50.0) ** 2
    sl = 1.0 + 0.015 * lm50sq / math.sqrt(20.0 + lm50sq)
    sc = 1.0 + 0.045 * cpbar
    sh = 1.0 + 0.015 * cpbar * t
    rt = -math.sin(math.radians(2.0 * dtheta)) * rc

    vl = dlp / sl
    vc = dcp / sc
    vh = dHp / sh
    return math.sqrt(vl * vl + vc * vc + vh * vh + rt * vc * vh)


def ciede2000_pairs(lab1: np.ndarray, lab2: np.ndarray) -> np.ndarray:
    """Vectorized CIEDE2000 over paired rows of two (N, 3) Lab arrays."""
    lab1 = np.atleast_2d(np.asarray(lab1, dtype=np.float64))
    lab2 = np.atleast_2d(np.asarray(lab2, dtype=np.float64))
    l1, a1, b1 = lab1[:, 0], lab1[:, 1], lab1[:, 2]
    l2, a2, b2 = lab2[:, 0], lab2[:, 1], lab2[:, 2]

    c1 = np.hypot(a1, b1)
    c2 = np.hypot(a2, b2)
    cbar7 = (0.5 * (c1 + c2)) ** 7
    g = 0.5 * (1.0 - np.sqrt(cbar7 / (cbar7 + _POW25_7)))
    ap1 = (1.0 + g) * a1
    ap2 = (1.0 + g) * a2
    cp1 = np.hypot(ap1, b1)
    cp2 = np.hypot(ap2, b2)

    hp1 = np.degrees(np.arctan2(b1, ap1)) % 360.0
    hp1[(ap1 == 0.0) & (b1 == 0.0)] = 0.0
    hp2 = np.degrees(np.arctan2(b2, ap2)) % 360.0
    hp2[(ap2 == 0.0) & (b2 == 0.0)] = 0.0

    dlp = l2 - l1
    dcp = cp2 - cp1

    cc = cp1 * cp2
    dhp = hp2 - hp1
    dhp = np.where(dhp > 180.0, dhp - 360.0, dhp)
    dhp = np.where(dhp < -180.0, dhp + 360.0, dhp)
    dhp = np.where(cc == 0.0, 0.0, dhp)
    dHp = 2.0 * np.sqrt(cc) * np.sin(np.radians(dhp) / 2.0)

    lbar = 0.5 * (l1 + l2)
    cpbar = 0.5 * (cp1 + cp2)
    hsum = hp1 + hp2
    hbar = 0.5 * hsum
    far = np.abs(hp1 - hp2) > 180.0
    hbar = np.where(far & (hsum < 360.0), hbar + 180.0, hbar)
    hbar = np.where(far & (hsum >= 360.0), hbar - 180.0, hbar)
    hbar = np.where(cc == 0.0, hsum, hbar)

    t = (
        1.0
        - 0.17 * np.cos(np.radians(hbar - 30.0))
        + 0.24 * np.cos(np.radians(2.0 * hbar))
        + 0.32 * np.cos(np.radians(3.0 * hbar + 6.0))
        - 0.20 * np.cos(np.radians(4.0 * hbar - 63.0))
    )
    dtheta = 30.0 * np.exp(-(((hbar - 275.0) / 25.0) ** 2))
    cpbar7 = cpbar**7
    rc = 2.0 * np.sqrt(cpbar7 / (cpbar7 + _POW25_7))
    lm50sq = (lbar - 50.0) ** 2
    sl = 1.0 + 0.015 * lm50sq / np.sqrt(20.0 + lm50sq)
    sc = 1.0 + 0.045 * cpbar
    sh = 1.0 + 0.015 * cpbar * t
    rt = -np.sin(np.radians(2.0 * dtheta)) * rc

    vl = dlp / sl
    vc = dcp / sc
    vh = dHp / sh
    return np.sqrt(vl * vl + vc * vc + vh * vh + rt * vc * vh)


def luminance_diff(x, y) -> float:
    """Absolute CIELAB lightness difference |L1 - L2|."""
    return abs(_lab_tuple(x)[0] - _lab_tuple(y)[0])


def lch_hue(x) -> float:
    """Hue angle of a Lab color in degrees, in [0, 360); 0 for achromatic."""
    _, a, b = _lab_tuple(x)
    if a == 0.0 and b == 0.0:
        return 0.0
    h = math.degrees(math.atan2(b, a)) % 360.0
    # A denormal negative angle can round the modulo up to exactly 360.
    return 0.0 if h == 360.0 else h
