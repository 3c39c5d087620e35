// SVG export of a solved chart, emitting the same document structure and
// formatting as the engine's renderer so exports are interchangeable.

import { HistogramDraft } from './scene.js';
import { PreviewSolution } from './session.js';

export interface RenderOptions {
  width: number;
  height: number;
  margin: number;
  legend: boolean;
  legendWidth: number;
}

export const DEFAULT_RENDER_OPTIONS: RenderOptions = {
  width: 800,
  height: 500,
  margin: 40,
  legend: true,
  legendWidth: 150,
};

function fmt(v: number): string {
  return v
    .toFixed(3)
    .replace(/0+$/, '')
    .replace(/\.$/, '');
}

function escapeText(text: string): string {
  return text.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;');
}

export function renderSvg(
  draft: HistogramDraft,
  solution: PreviewSolution,
  options: RenderOptions = DEFAULT_RENDER_OPTIONS,
): string {
  const m = draft.classLabels.length;
  if (solution.palette.length !== m) {
    throw new Error(`solution has ${solution.palette.length} classes, chart has ${m}`);
  }
  const opt = options;
  const legendW = opt.legend ? opt.legendWidth : 0;
  const plotW = opt.width - 2 * opt.margin - legendW;
  const plotH = opt.height - 2 * opt.margin;
  const edges = draft.binEdges;
  const x0 = edges[0];
  const x1 = edges[edges.length - 1];
  const maxH = Math.max(...draft.heights.map((row) => Math.max(...row)));

  const sx = (x: number) => opt.margin + ((x - x0) / (x1 - x0)) * plotW;
  const sy = (h: number) => opt.margin + plotH - (h / maxH) * plotH;

  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${opt.width}" ` +
      `height="${opt.height}" viewBox="0 0 ${opt.width} ${opt.height}">`,
    `<rect x="0" y="0" width="${opt.width}" height="${opt.height}" ` +
      `fill="${draft.background}"/>`,
  ];
  for (const cls of solution.order) {
    parts.push(`<g fill="${solution.palette[cls]}" fill-opacity="${fmt(solution.opacities[cls])}">`);
    for (let b = 0; b < edges.length - 1; b++) {
      const h = draft.heights[cls][b];
      if (h <= 0) continue;
      const x = sx(edges[b]);
      const y = sy(h);
      parts.push(
        `<rect x="${fmt(x)}" y="${fmt(y)}" ` +
          `width="${fmt(sx(edges[b + 1]) - x)}" ` +
          `height="${fmt(opt.margin + plotH - y)}"/>`,
      );
    }
    parts.push('</g>');
  }
  parts.push(
    `<line x1="${opt.margin}" y1="${opt.margin + plotH}" ` +
      `x2="${opt.margin + plotW}" y2="${opt.margin + plotH}" ` +
      `stroke="#555555" stroke-width="1"/>`,
  );
  if (opt.legend) {
    const lx = opt.margin + plotW + 20;
    const ly = opt.margin;
    parts.push('<g font-family="sans-serif" font-size="13">');
    const topFirst = [...solution.order].reverse();
    topFirst.forEach((cls, row) => {
      const y = ly + row * 22;
      parts.push(
        `<rect x="${lx}" y="${y}" width="14" height="14" ` +
          `fill="${solution.palette[cls]}" ` +
          `fill-opacity="${fmt(solution.opacities[cls])}"/>`,
      );
      parts.push(`<text x="${lx + 20}" y="${y + 12}">${escapeText(draft.classLabels[cls])}</text>`);
    });
    parts.push('</g>');
  }
  parts.push('</svg>');
  return `${parts.join('\n')}\n`;
}
