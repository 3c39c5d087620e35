"""Chart rendering: SVG bar charts for histogram scenes, PNG color maps for
raster scenes. Output bytes are deterministic for fixed inputs."""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from PIL import Image

from .colorspace import Srgb8, _decode_channel, _encode_channel
from .compositing import BlendSpace
from .objective import Solution
from .scene import HistogramSpec, LayerMaskSet

__all__ = ["RenderOptions", "render_svg", "render_region_png"]


@dataclass
class RenderOptions:
    width: int = 800
    height: int = 500
    margin: int = 40
    legend: bool = True
    legend_width: int = 150


def _fmt(v: float) -> str:
    return f"{v:.3f}".rstrip("0").rstrip(".")


def render_svg(
    spec: HistogramSpec,
    solution: Solution,
    background: Srgb8 = Srgb8(255, 255, 255),
    options: RenderOptions | None = None,
) -> str:
    """Render overlapped histogram bars as translucent SVG rects.

    Bars are emitted per class in rendering order (painter's order), each
    with the class palette color and opacity; the legend lists classes
    top layer first.
    """
    if solution.m != spec.m:
        raise ValueError(f"solution has {solution.m} classes, spec has {spec.m}")
    opt = options or RenderOptions()
    legend_w = opt.legend_width if opt.legend else 0
    plot_w = opt.width - 2 * opt.margin - legend_w
    plot_h = opt.height - 2 * opt.margin
    if plot_w <= 0 or plot_h <= 0:
        raise ValueError("render area is empty; enlarge width/height")

    edges = list(spec.bin_edges)
    x0, x1 = edges[0], edges[-1]
    max_h = max(max(row) for row in spec.heights)

    def sx(x: float) -> float:
        return opt.margin + (x - x0) / (x1 - x0) * plot_w

    def sy(h: float) -> float:
        return opt.margin + plot_h - h / max_h * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{opt.width}" '
        f'height="{opt.height}" viewBox="0 0 {opt.width} {opt.height}">',
        f'<rect x="0" y="0" width="{opt.width}" height="{opt.height}" '
        f'fill="{background.to_hex()}"/>',
    ]
    for cls in solution.order:
        color = solution.palette[cls].to_hex()
        alpha = solution.opacities[cls]
        parts.append(f'<g fill="{color}" fill-opacity="{_fmt(alpha)}">')
        for b in range(spec.bin_count):
            h = spec.heights[cls][b]
            if h <= 0:
                continue
            x = sx(edges[b])
            y = sy(h)
            parts.append(
                f'<rect x="{_fmt(x)}" y="{_fmt(y)}" '
                f'width="{_fmt(sx(edges[b + 1]) - x)}" '
                f'height="{_fmt(opt.margin + plot_h - y)}"/>'
            )
        parts.append("</g>")
    parts.append(
        f'<line x1="{opt.margin}" y1="{opt.margin + plot_h}" '
        f'x2="{opt.margin + plot_w}" y2="{opt.margin + plot_h}" '
        f'stroke="#555555" stroke-width="1"/>'
    )
    if opt.legend:
        lx = opt.margin + plot_w + 20
        ly = opt.margin
        parts.append('<g font-family="sans-serif" font-size="13">')
        # Top-drawn layer first, matching how the stack reads visually.
        for row, cls in enumerate(reversed(list(solution.order))):
            y = ly + row * 22
            parts.append(
                f'<rect x="{lx}" y="{y}" width="14" height="14" '
                f'fill="{solution.palette[cls].to_hex()}" '
                f'fill-opacity="{_fmt(solution.opacities[cls])}"/>'
            )
            parts.append(
                f'<text x="{lx + 20}" y="{y + 12}">{_escape(spec.class_labels[cls])}</text>'
            )
        parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def render_region_png(
    masks: LayerMaskSet,
    solution: Solution,
    blend_space: BlendSpace = BlendSpace.LINEAR,
) -> bytes:
    """Per-pixel composite of the mask layers; returns PNG bytes."""
    if solution.m != masks.m:
        raise ValueError(f"solution has {solution.m} classes, mask set has {masks.m}")

    def decode(c: Srgb8) -> np.ndarray:
        enc = np.asarray(c.as_tuple(), dtype=np.float64) / 255.0
        if blend_space is BlendSpace.GAMMA:
            return enc
        return np.asarray([_decode_channel(v) for v in enc])

    h, w = masks.masks.shape[1:]
    canvas = np.broadcast_to(decode(masks.background), (h, w, 3)).copy()
    for cls in solution.order:
        sel = masks.masks[cls]
        a = solution.opacities[cls]
        src = decode(solution.palette[cls])
        canvas[sel] = a * src + (1.0 - a) * canvas[sel]
    canvas = np.clip(canvas, 0.0, 1.0)
    if blend_space is BlendSpace.LINEAR:
        canvas = np.where(
            canvas <= 0.0031308, canvas * 12.92, 1.055 * canvas ** (1.0 / 2.4) - 0.055
        )
    img = Image.fromarray(np.floor(canvas * 255.0 + 0.5).astype(np.uint8))
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


# Re-exported so callers can build custom rasterizers consistent with the
# engine's channel encoding.
encode_channel = _encode_channel
decode_channel = _decode_channel
