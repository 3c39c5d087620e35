// Full studio loop: edit distributions, run the optimizer through the API,
// preview locally, export the solution document, and confirm the CLI
// re-scores it to the identical breakdown.

import { execFile } from 'node:child_process';
import { mkdtempSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import { promisify } from 'node:util';

import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { StudioApi } from '../src/api.js';
import { hexToRgb } from '../src/compositor.js';
import { StudioSession } from '../src/session.js';
import { RunningService, startService } from './server.js';

const run = promisify(execFile);

describe('full loop', () => {
  let service: RunningService;

  beforeAll(async () => {
    service = await startService();
  }, 40_000);

  afterAll(() => {
    service?.stop();
  });

  it(
    'edit -> run -> preview -> export re-scores identically via the CLI',
    async () => {
      const session = new StudioSession();
      session.setBinHeight(0, 4, 1.5); // user edit before the run
      session.schedule = { ...session.schedule, t_start: 10, t_end: 0.01, gamma: 0.9, seed: 21 };

      const api = new StudioApi(service.baseUrl);
      const entry = await session.runOptimization(api);
      expect(session.history.length).toBe(1);
      expect(entry.document.format).toBe('solution/1');
      expect(entry.document.score.feasible).toBe(true);

      // Local preview parity against the run's own region colors.
      const preview = session.previewRegionColors();
      expect(preview.length).toBe(entry.document.score.region_colors.length);
      entry.document.score.region_colors.forEach((server, idx) => {
        const got = hexToRgb(server.srgb);
        const client = preview[idx].color;
        expect(Math.abs(got.r - client.r)).toBeLessThanOrEqual(1);
        expect(Math.abs(got.g - client.g)).toBeLessThanOrEqual(1);
        expect(Math.abs(got.b - client.b)).toBeLessThanOrEqual(1);
      });

      // Export both documents and re-score with the CLI.
      const dir = mkdtempSync(join(tmpdir(), 'studio-'));
      const scenePath = join(dir, 'scene.json');
      const solutionPath = join(dir, 'solution.json');
      writeFileSync(scenePath, session.exportSceneDocument());
      writeFileSync(solutionPath, session.exportSolutionDocument(entry));

      const { stdout } = await run('python3', [
        '-m', 'overglaze.cli', 'score',
        '--scene', scenePath,
        '--solution', solutionPath,
        '--name-model', 'builtin',
        '--json',
      ]);
      const rescored = JSON.parse(stdout);
      expect(rescored.total).toBe(entry.document.score.total);
      expect(rescored.association).toBe(entry.document.score.association);
      expect(rescored.disassociation).toBe(entry.document.score.disassociation);
      expect(rescored.separability).toBe(entry.document.score.separability);
      expect(rescored.feasible).toBe(true);
      expect(rescored.region_colors).toEqual(entry.document.score.region_colors);
    },
    120_000,
  );

  it('history entries are never mutated by later runs', async () => {
    const session = new StudioSession();
    session.schedule = { ...session.schedule, t_start: 10, t_end: 0.01, gamma: 0.9, seed: 3 };
    const api = new StudioApi(service.baseUrl);
    const first = await session.runOptimization(api);
    const frozen = JSON.stringify(first.document);
    session.setBinHeight(0, 0, 5);
    session.schedule = { ...session.schedule, seed: 4 };
    await session.runOptimization(api);
    expect(session.history.length).toBe(2);
    expect(JSON.stringify(session.history[0].document)).toBe(frozen);
  });
});
