// Analytic scene views of a histogram draft: per-bin vertical intervals with
// their covering class sets, and the region signature census. Mirrors the
// service's region extraction so previews and parity checks agree.

import { BlendSpace, Rgb, regionColor } from './compositor.js';

export interface HistogramDraft {
  classLabels: string[];
  binEdges: number[];
  heights: number[][]; // [class][bin]
  background: string; // #rrggbb
}

export interface BinInterval {
  lo: number;
  hi: number;
  signature: number[];
}

/** Stacked intervals for one bin, bottom to top. */
export function binIntervals(heights: number[][], bin: number): BinInterval[] {
  const column = heights.map((row) => row[bin]);
  const levels = [...new Set(column.filter((h) => h > 0))].sort((a, b) => a - b);
  const out: BinInterval[] = [];
  let prev = 0;
  for (const level of levels) {
    const signature = column
      .map((h, cls) => (h >= level ? cls : -1))
      .filter((cls) => cls >= 0);
    out.push({ lo: prev, hi: level, signature });
    prev = level;
  }
  return out;
}

/** All region signatures present in the draft, base single-class first. */
export function regionSignatures(heights: number[][]): number[][] {
  const seen = new Map<string, number[]>();
  for (let b = 0; b < heights[0].length; b++) {
    for (const iv of binIntervals(heights, b)) {
      seen.set(iv.signature.join(','), iv.signature);
    }
  }
  const sigs = [...seen.values()];
  sigs.sort((x, y) =>
    x.length !== y.length ? x.length - y.length : x.join(',').localeCompare(y.join(',')),
  );
  const singles = sigs.filter((s) => s.length === 1);
  const composites = sigs.filter((s) => s.length > 1);
  return [...singles, ...composites];
}

export interface SolutionView {
  palette: Rgb[];
  opacities: number[];
  order: number[];
}

/** Composite color of every region signature, in census order. */
export function regionColorsForDraft(
  draft: HistogramDraft,
  solution: SolutionView,
  background: Rgb,
  space: BlendSpace = 'linear',
): { signature: number[]; color: Rgb }[] {
  return regionSignatures(draft.heights).map((signature) => ({
    signature,
    color: regionColor(
      signature,
      solution.palette,
      solution.opacities,
      solution.order,
      background,
      space,
    ),
  }));
}
