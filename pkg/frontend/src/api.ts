// Typed client for the optimization service's /v1 REST API.

export interface HistogramSceneBody {
  class_labels: string[];
  bin_edges: number[];
  heights: number[][];
  background: string;
}

export interface ConfigBody {
  weights: [number, number, number];
  jnd_threshold: number;
  bg_contrast_min: number;
  similarity: string;
  separability_scale: string;
  blend_space: string;
}

export interface ScheduleBody {
  t_start: number;
  t_end: number;
  gamma: number;
  rgb_step: number;
  alpha_step: number;
  alpha_bounds: [number, number];
  max_candidate_retries: number;
  seed: number;
}

export interface ScoreBody {
  association: number;
  disassociation: number;
  separability: number;
  total: number;
  feasible: boolean;
  region_colors: { srgb: string; lab: [number, number, number] }[];
  notes: string[];
}

export interface SolutionDocument {
  format: string;
  palette: string[];
  opacities: number[];
  order: number[];
  score: ScoreBody;
  config: Record<string, unknown>;
  schedule?: Record<string, unknown>;
}

export interface JobResult {
  document: SolutionDocument;
  trace_csv: string;
  scene_warnings: string[];
}

export interface JobStatus {
  id: string;
  status: 'queued' | 'running' | 'done' | 'failed';
  result?: JobResult;
  error?: { code: string; message: string; violations?: unknown };
}

export interface ScoreResponse {
  score: ScoreBody;
  constraints: { ok: boolean };
  scene_warnings: string[];
}

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

async function parseError(response: Response): Promise<never> {
  let code = 'http_error';
  let message = `${response.status} ${response.statusText}`;
  try {
    const body = await response.json();
    if (body?.error) {
      code = body.error.code ?? code;
      message = body.error.message ?? message;
    }
  } catch {
    // keep the HTTP-level message
  }
  throw new ServiceError(response.status, code, message);
}

export class StudioApi {
  constructor(readonly baseUrl: string) {}

  private async post<T>(path: string, body: unknown): Promise<T> {
    const response = await fetch(`${this.baseUrl}${path}`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(body),
    });
    if (!response.ok) await parseError(response);
    return (await response.json()) as T;
  }

  async health(): Promise<boolean> {
    try {
      const response = await fetch(`${this.baseUrl}/v1/healthz`);
      return response.ok;
    } catch {
      return false;
    }
  }

  async submitOptimize(
    scene: HistogramSceneBody,
    config: ConfigBody,
    schedule: ScheduleBody,
    fixedPalette: string[] | null,
  ): Promise<string> {
    const body: Record<string, unknown> = { scene: { histogram: scene }, config, schedule };
    if (fixedPalette) body.fixed_palette = fixedPalette;
    const out = await this.post<{ job_id: string }>('/v1/optimize', body);
    return out.job_id;
  }

  async jobStatus(jobId: string): Promise<JobStatus> {
    const response = await fetch(`${this.baseUrl}/v1/jobs/${jobId}`);
    if (!response.ok) await parseError(response);
    return (await response.json()) as JobStatus;
  }

  /** Poll until the job finishes; reject on failure or timeout. */
  async waitForJob(jobId: string, timeoutMs = 120_000, intervalMs = 150): Promise<JobResult> {
    const deadline = Date.now() + timeoutMs;
    while (Date.now() < deadline) {
      const status = await this.jobStatus(jobId);
      if (status.status === 'done' && status.result) return status.result;
      if (status.status === 'failed') {
        throw new ServiceError(422, status.error?.code ?? 'job_failed',
          status.error?.message ?? 'optimization failed');
      }
      await new Promise((resolve) => setTimeout(resolve, intervalMs));
    }
    throw new ServiceError(408, 'timeout', `job ${jobId} did not finish in time`);
  }

  async score(
    scene: HistogramSceneBody,
    solution: { palette: string[]; opacities: number[]; order: number[] },
    config: ConfigBody,
  ): Promise<ScoreResponse> {
    return this.post<ScoreResponse>('/v1/score', {
      scene: { histogram: scene },
      solution,
      config,
    });
  }

  async stimulus(params: {
    classes: number;
    smoothness: string;
    bins: number;
    seed: number;
  }): Promise<HistogramSceneBody> {
    const out = await this.post<{ histogram: HistogramSceneBody & { format: string } }>(
      '/v1/stimuli',
      params,
    );
    return {
      class_labels: out.histogram.class_labels,
      bin_edges: out.histogram.bin_edges,
      heights: out.histogram.heights,
      background: out.histogram.background ?? '#ffffff',
    };
  }
}
