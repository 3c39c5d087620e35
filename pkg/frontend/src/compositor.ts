// Client-side Porter-Duff compositing, mirroring the service's math exactly
// so previews need no server round trip. Channel values follow the same
// decode -> blend -> encode -> quantize pipeline as the engine.

export type BlendSpace = 'linear' | 'gamma';

export interface Rgb {
  r: number;
  g: number;
  b: number;
}

export interface Layer {
  color: Rgb;
  alpha: number;
}

export function hexToRgb(hex: string): Rgb {
  const s = hex.replace(/^#/, '');
  if (!/^[0-9a-fA-F]{6}$/.test(s)) {
    throw new Error(`expected #rrggbb hex color, got ${hex}`);
  }
  return {
    r: parseInt(s.slice(0, 2), 16),
    g: parseInt(s.slice(2, 4), 16),
    b: parseInt(s.slice(4, 6), 16),
  };
}

export function rgbToHex(c: Rgb): string {
  const h = (v: number) => v.toString(16).padStart(2, '0');
  return `#${h(c.r)}${h(c.g)}${h(c.b)}`;
}

function decodeChannel(v8: number, space: BlendSpace): number {
  const v = v8 / 255.0;
  if (space === 'gamma') return v;
  return v <= 0.04045 ? v / 12.92 : Math.pow((v + 0.055) / 1.055, 2.4);
}

function encodeChannel(v: number, space: BlendSpace): number {
  if (space === 'gamma') return v;
  return v <= 0.0031308 ? v * 12.92 : 1.055 * Math.pow(v, 1.0 / 2.4) - 0.055;
}

/** Composite translucent layers bottom-to-top over an opaque background. */
export function compositeStack(stack: Layer[], background: Rgb, space: BlendSpace): Rgb {
  let acc = [
    decodeChannel(background.r, space),
    decodeChannel(background.g, space),
    decodeChannel(background.b, space),
  ];
  for (const layer of stack) {
    const src = [
      decodeChannel(layer.color.r, space),
      decodeChannel(layer.color.g, space),
      decodeChannel(layer.color.b, space),
    ];
    const a = layer.alpha;
    acc = acc.map((d, i) => a * src[i] + (1.0 - a) * d);
  }
  return {
    r: quantize(acc[0], space),
    g: quantize(acc[1], space),
    b: quantize(acc[2], space),
  };
}

function quantize(v: number, space: BlendSpace): number {
  const clamped = Math.min(1.0, Math.max(0.0, v));
  return Math.floor(encodeChannel(clamped, space) * 255.0 + 0.5);
}

/**
 * Displayed color of a region covered by `signature`, from palette colors,
 * per-class opacities, and the bottom-to-top rendering order.
 */
export function regionColor(
  signature: number[],
  palette: Rgb[],
  opacities: number[],
  order: number[],
  background: Rgb,
  space: BlendSpace = 'linear',
): Rgb {
  const sig = new Set(signature);
  const stack: Layer[] = [];
  for (const cls of order) {
    if (sig.has(cls)) {
      stack.push({ color: palette[cls], alpha: opacities[cls] });
    }
  }
  return compositeStack(stack, background, space);
}
