// Studio session state: the editable scene draft, optimizer configuration,
// run history, and the active preview. Pure logic, no DOM.

import {
  ConfigBody,
  HistogramSceneBody,
  ScheduleBody,
  SolutionDocument,
  StudioApi,
} from './api.js';
import { hexToRgb, Rgb } from './compositor.js';
import { HistogramDraft, regionColorsForDraft } from './scene.js';

export const MAX_CLASSES = 4;

export interface HistoryEntry {
  jobId: string;
  document: SolutionDocument;
  traceCsv: string;
  completedAt: number;
}

export interface PreviewSolution {
  palette: string[];
  opacities: number[];
  order: number[];
}

const CLASS_NAMES = ['A', 'B', 'C', 'D'];

export function defaultDraft(): HistogramDraft {
  return {
    classLabels: ['A', 'B'],
    binEdges: [0, 1, 2, 3, 4, 5],
    heights: [
      [3, 4, 2.5, 1, 0],
      [0, 1.5, 3, 3.5, 2],
    ],
    background: '#ffffff',
  };
}

export function defaultConfig(): ConfigBody {
  return {
    weights: [1, 1, 1],
    jnd_threshold: 3,
    bg_contrast_min: 5,
    similarity: 'name',
    separability_scale: 'normalized',
    blend_space: 'linear',
  };
}

export function defaultSchedule(): ScheduleBody {
  return {
    t_start: 100_000,
    t_end: 0.001,
    gamma: 0.99,
    rgb_step: 10,
    alpha_step: 0.1,
    alpha_bounds: [0.1, 0.9],
    max_candidate_retries: 100,
    seed: 0,
  };
}

export class StudioSession {
  draft: HistogramDraft = defaultDraft();
  config: ConfigBody = defaultConfig();
  schedule: ScheduleBody = defaultSchedule();
  fixedPalette: string[] | null = null;
  readonly history: HistoryEntry[] = [];
  preview: PreviewSolution | null = null;

  private undoStack: HistogramDraft[] = [];

  private snapshot() {
    this.undoStack.push(JSON.parse(JSON.stringify(this.draft)));
    if (this.undoStack.length > 100) this.undoStack.shift();
  }

  /** Set one bar height. Negative values are rejected. */
  setBinHeight(cls: number, bin: number, value: number) {
    if (!Number.isFinite(value) || value < 0) {
      throw new Error('bar heights must be non-negative');
    }
    if (cls < 0 || cls >= this.draft.classLabels.length) throw new Error('no such class');
    if (bin < 0 || bin >= this.draft.binEdges.length - 1) throw new Error('no such bin');
    this.snapshot();
    this.draft.heights[cls][bin] = value;
  }

  /** Add a class; at most MAX_CLASSES, matching the optimizer's study range. */
  addClass(): string | null {
    if (this.draft.classLabels.length >= MAX_CLASSES) {
      return `at most ${MAX_CLASSES} classes are supported`;
    }
    this.snapshot();
    const idx = this.draft.classLabels.length;
    this.draft.classLabels.push(CLASS_NAMES[idx] ?? `class ${idx}`);
    const bins = this.draft.binEdges.length - 1;
    const row = new Array(bins).fill(0);
    row[Math.min(idx, bins - 1)] = 2;
    this.draft.heights.push(row);
    this.preview = null;
    return null;
  }

  removeClass(cls: number) {
    if (this.draft.classLabels.length <= 1) throw new Error('need at least one class');
    this.snapshot();
    this.draft.classLabels.splice(cls, 1);
    this.draft.heights.splice(cls, 1);
    this.preview = null;
  }

  undo(): boolean {
    const prev = this.undoStack.pop();
    if (!prev) return false;
    this.draft = prev;
    return true;
  }

  sceneBody(): HistogramSceneBody {
    return {
      class_labels: [...this.draft.classLabels],
      bin_edges: [...this.draft.binEdges],
      heights: this.draft.heights.map((row) => [...row]),
      background: this.draft.background,
    };
  }

  /** POST the draft to the optimizer, poll the job, append to history. */
  async runOptimization(api: StudioApi): Promise<HistoryEntry> {
    const jobId = await api.submitOptimize(
      this.sceneBody(),
      this.config,
      this.schedule,
      this.fixedPalette,
    );
    const result = await api.waitForJob(jobId);
    const entry: HistoryEntry = {
      jobId,
      document: result.document,
      traceCsv: result.trace_csv,
      completedAt: Date.now(),
    };
    this.history.push(entry);
    this.preview = {
      palette: [...result.document.palette],
      opacities: [...result.document.opacities],
      order: [...result.document.order],
    };
    return entry;
  }

  /** Swap two positions of the previewed rendering order (local only). */
  togglePreviewOrder(i: number, j: number) {
    if (!this.preview) throw new Error('no active preview');
    const order = [...this.preview.order];
    [order[i], order[j]] = [order[j], order[i]];
    this.preview = { ...this.preview, order };
  }

  /** Region colors of the current preview, computed client-side. */
  previewRegionColors(): { signature: number[]; color: Rgb }[] {
    if (!this.preview) return [];
    return regionColorsForDraft(
      this.draft,
      {
        palette: this.preview.palette.map(hexToRgb),
        opacities: this.preview.opacities,
        order: this.preview.order,
      },
      hexToRgb(this.draft.background),
      this.config.blend_space as 'linear' | 'gamma',
    );
  }

  /** Scene document in the engine's histogram-spec file format. */
  exportSceneDocument(): string {
    return canonicalJson({
      format: 'histogram-spec/1',
      class_labels: this.draft.classLabels,
      bin_edges: this.draft.binEdges,
      heights: this.draft.heights,
      background: this.draft.background,
    });
  }

  /** Solution document for a history entry, as the CLI would consume it. */
  exportSolutionDocument(entry: HistoryEntry): string {
    return canonicalJson(entry.document);
  }

  /** Best-score series from a trace CSV, for convergence sparklines. */
  sparklineSeries(traceCsv: string, points = 60): number[] {
    const lines = traceCsv.trim().split('\n');
    const header = lines[0].split(',');
    const col = header.indexOf('best_score');
    const series = lines.slice(1).map((line) => Number(line.split(',')[col]));
    if (series.length <= points) return series;
    const step = series.length / points;
    return Array.from({ length: points }, (_, i) => series[Math.floor(i * step)]);
  }
}

/** Key-sorted JSON with a trailing newline, like the engine's writers. */
export function canonicalJson(value: unknown): string {
  return `${JSON.stringify(sortKeys(value))}\n`;
}

function sortKeys(value: unknown): unknown {
  if (Array.isArray(value)) return value.map(sortKeys);
  if (value && typeof value === 'object') {
    return Object.fromEntries(
      Object.entries(value as Record<string, unknown>)
        .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
        .map(([k, v]) => [k, sortKeys(v)]),
    );
  }
  return value;
}
