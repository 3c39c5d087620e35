// DOM wiring for the design studio: distribution editor, optimizer controls,
// live composite preview, run history with convergence sparklines, exports.

import { StudioApi } from './api.js';
import { rgbToHex } from './compositor.js';
import { binIntervals, regionColorsForDraft } from './scene.js';
import { HistoryEntry, MAX_CLASSES, StudioSession } from './session.js';
import { renderSvg } from './svg.js';

const session = new StudioSession();

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function api(): StudioApi {
  return new StudioApi(el<HTMLInputElement>('server-url').value.replace(/\/$/, ''));
}

function setStatus(text: string, isError = false) {
  const banner = el<HTMLDivElement>('status');
  banner.textContent = text;
  banner.className = isError ? 'status error' : 'status';
}

// ---------------------------------------------------------------- editor

function renderEditor() {
  const table = el<HTMLTableElement>('bins-table');
  table.innerHTML = '';
  const bins = session.draft.binEdges.length - 1;
  const head = table.insertRow();
  head.insertCell().textContent = 'class';
  for (let b = 0; b < bins; b++) head.insertCell().textContent = `bin ${b}`;
  head.insertCell().textContent = '';
  session.draft.classLabels.forEach((label, cls) => {
    const row = table.insertRow();
    row.insertCell().textContent = label;
    for (let b = 0; b < bins; b++) {
      const cell = row.insertCell();
      const input = document.createElement('input');
      input.type = 'number';
      input.min = '0';
      input.step = '0.5';
      input.value = String(session.draft.heights[cls][b]);
      input.addEventListener('change', () => {
        try {
          session.setBinHeight(cls, b, Number(input.value));
          setStatus('distribution updated');
        } catch (err) {
          input.value = String(session.draft.heights[cls][b]);
          setStatus(String(err), true);
        }
        renderPreview();
      });
      cell.appendChild(input);
    }
    const actions = row.insertCell();
    if (session.draft.classLabels.length > 1) {
      const remove = document.createElement('button');
      remove.textContent = 'remove';
      remove.addEventListener('click', () => {
        session.removeClass(cls);
        renderEditor();
        renderPreview();
      });
      actions.appendChild(remove);
    }
  });
}

function wireControls() {
  el<HTMLButtonElement>('add-class').addEventListener('click', () => {
    const message = session.addClass();
    if (message) {
      setStatus(message, true);
      return;
    }
    setStatus(`class added (${session.draft.classLabels.length}/${MAX_CLASSES})`);
    renderEditor();
    renderPreview();
  });
  el<HTMLButtonElement>('undo').addEventListener('click', () => {
    setStatus(session.undo() ? 'undone' : 'nothing to undo');
    renderEditor();
    renderPreview();
  });
  el<HTMLButtonElement>('load-stimulus').addEventListener('click', async () => {
    try {
      const body = await api().stimulus({
        classes: Math.max(2, Math.min(4, session.draft.classLabels.length)),
        smoothness: 'moderate',
        bins: 12,
        seed: Math.floor(Math.random() * 10_000),
      });
      session.draft = {
        classLabels: body.class_labels,
        binEdges: body.bin_edges,
        heights: body.heights,
        background: body.background,
      };
      session.preview = null;
      renderEditor();
      renderPreview();
      setStatus('stimulus loaded');
    } catch (err) {
      setStatus(String(err), true);
    }
  });
  el<HTMLButtonElement>('run').addEventListener('click', runOptimization);
}

function readConfig() {
  session.config.weights = [
    Number(el<HTMLInputElement>('w1').value),
    Number(el<HTMLInputElement>('w2').value),
    Number(el<HTMLInputElement>('w3').value),
  ];
  session.config.jnd_threshold = Number(el<HTMLInputElement>('eta').value);
  session.config.bg_contrast_min = Number(el<HTMLInputElement>('sigma').value);
  session.config.similarity = el<HTMLSelectElement>('similarity').value;
  session.config.blend_space = el<HTMLSelectElement>('blend-space').value;
  session.schedule.seed = Number(el<HTMLInputElement>('seed').value);
  const lock = el<HTMLInputElement>('fixed-palette').value.trim();
  session.fixedPalette = lock ? lock.split(',').map((s) => s.trim()) : null;
}

// ---------------------------------------------------------------- runs

async function runOptimization() {
  readConfig();
  const healthy = await api().health();
  if (!healthy) {
    setStatus('service unreachable; is `overglaze serve` running?', true);
    return;
  }
  setStatus('optimizing…');
  el<HTMLButtonElement>('run').disabled = true;
  try {
    const entry = await session.runOptimization(api());
    setStatus(`run finished: total ${entry.document.score.total.toFixed(4)}`);
    renderHistory();
    renderPreview();
  } catch (err) {
    setStatus(String(err), true);
  } finally {
    el<HTMLButtonElement>('run').disabled = false;
  }
}

function sparklineSvg(series: number[]): string {
  if (series.length < 2) return '';
  const w = 120;
  const h = 28;
  const min = Math.min(...series);
  const max = Math.max(...series);
  const span = max - min || 1;
  const points = series
    .map((v, i) => `${((i / (series.length - 1)) * w).toFixed(1)},${(h - ((v - min) / span) * h).toFixed(1)}`)
    .join(' ');
  return `<svg width="${w}" height="${h}"><polyline fill="none" stroke="#4477aa" stroke-width="1.5" points="${points}"/></svg>`;
}

function download(name: string, text: string, type = 'application/json') {
  const blob = new Blob([text], { type });
  const url = URL.createObjectURL(blob);
  const link = document.createElement('a');
  link.href = url;
  link.download = name;
  link.click();
  URL.revokeObjectURL(url);
}

function renderHistory() {
  const list = el<HTMLUListElement>('history');
  list.innerHTML = '';
  [...session.history].reverse().forEach((entry) => {
    const item = document.createElement('li');
    const score = entry.document.score;
    const label = document.createElement('span');
    label.textContent =
      `total ${score.total.toFixed(4)} | assoc ${score.association.toFixed(3)} ` +
      `| disassoc ${score.disassociation.toFixed(3)} | sep ${score.separability.toFixed(3)} `;
    item.appendChild(label);
    const spark = document.createElement('span');
    spark.innerHTML = sparklineSvg(session.sparklineSeries(entry.traceCsv));
    item.appendChild(spark);
    item.appendChild(exportButton('document', () => exportDocument(entry)));
    item.appendChild(exportButton('svg', () => exportSvg(entry)));
    item.appendChild(
      exportButton('show', () => {
        session.preview = {
          palette: [...entry.document.palette],
          opacities: [...entry.document.opacities],
          order: [...entry.document.order],
        };
        renderPreview();
      }),
    );
    list.appendChild(item);
  });
}

function exportButton(label: string, onClick: () => void): HTMLButtonElement {
  const button = document.createElement('button');
  button.textContent = label;
  button.addEventListener('click', onClick);
  return button;
}

function exportDocument(entry: HistoryEntry) {
  download('solution.json', session.exportSolutionDocument(entry));
}

function exportSvg(entry: HistoryEntry) {
  const svg = renderSvg(session.draft, {
    palette: [...entry.document.palette],
    opacities: [...entry.document.opacities],
    order: [...entry.document.order],
  });
  download('chart.svg', svg, 'image/svg+xml');
}

// ---------------------------------------------------------------- preview

function renderPreview() {
  const canvas = el<HTMLCanvasElement>('preview');
  const ctx = canvas.getContext('2d');
  if (!ctx) return;
  ctx.fillStyle = session.draft.background;
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  const legend = el<HTMLDivElement>('legend');
  legend.innerHTML = '';
  if (!session.preview) {
    ctx.fillStyle = '#888888';
    ctx.fillText('run the optimizer to preview', 20, 30);
    return;
  }

  const draft = session.draft;
  const bins = draft.binEdges.length - 1;
  const maxH = Math.max(...draft.heights.map((row) => Math.max(...row)));
  const pad = 12;
  const plotW = canvas.width - 2 * pad;
  const plotH = canvas.height - 2 * pad;
  const edges = draft.binEdges;
  const x0 = edges[0];
  const x1 = edges[edges.length - 1];

  // Each vertical interval gets its resolved composite color: the canvas
  // never does its own alpha math, so pixels match the engine exactly.
  const colors = new Map(
    regionColorsForDraft(
      draft,
      {
        palette: session.preview.palette.map((hex) => hexOf(hex)),
        opacities: session.preview.opacities,
        order: session.preview.order,
      },
      hexOf(draft.background),
      session.config.blend_space as 'linear' | 'gamma',
    ).map((r) => [r.signature.join(','), r.color]),
  );
  for (let b = 0; b < bins; b++) {
    const bx = pad + ((edges[b] - x0) / (x1 - x0)) * plotW;
    const bw = ((edges[b + 1] - edges[b]) / (x1 - x0)) * plotW;
    for (const interval of binIntervals(draft.heights, b)) {
      const color = colors.get(interval.signature.join(','));
      if (!color) continue;
      ctx.fillStyle = rgbToHex(color);
      const yTop = pad + plotH - (interval.hi / maxH) * plotH;
      const yBot = pad + plotH - (interval.lo / maxH) * plotH;
      ctx.fillRect(bx, yTop, bw, yBot - yTop);
    }
  }

  // Legend in top-layer-first order, with local order toggles.
  const topFirst = [...session.preview.order].reverse();
  topFirst.forEach((cls, row) => {
    const line = document.createElement('div');
    const swatch = document.createElement('span');
    swatch.className = 'swatch';
    const base = colors.get(String(cls));
    swatch.style.background = base ? rgbToHex(base) : session.preview!.palette[cls];
    line.appendChild(swatch);
    line.appendChild(document.createTextNode(` ${draft.classLabels[cls]} `));
    if (row < topFirst.length - 1) {
      const swap = document.createElement('button');
      swap.textContent = 'swap down';
      swap.addEventListener('click', () => {
        const order = session.preview!.order;
        const i = order.indexOf(cls);
        const j = order.indexOf(topFirst[row + 1]);
        session.togglePreviewOrder(i, j);
        renderPreview();
      });
      line.appendChild(swap);
    }
    legend.appendChild(line);
  });
}

function hexOf(hex: string) {
  const s = hex.replace('#', '');
  return {
    r: parseInt(s.slice(0, 2), 16),
    g: parseInt(s.slice(2, 4), 16),
    b: parseInt(s.slice(4, 6), 16),
  };
}

// ---------------------------------------------------------------- boot

export function boot() {
  wireControls();
  renderEditor();
  renderPreview();
  setStatus('ready');
}

if (typeof document !== 'undefined' && document.getElementById('bins-table')) {
  boot();
}
