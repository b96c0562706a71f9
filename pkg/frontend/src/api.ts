/** Thin client for the analysis service: runs, groups, jobs, polling. */

import type {
  ConfigDetailData,
  JobStatus,
  RunDetail,
  RunSummary,
} from './types.js';

export class ApiError extends Error {
  code: string;
  field?: string;

  constructor(code: string, message: string, field?: string) {
    super(message);
    this.code = code;
    this.field = field;
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const res = await fetch(url, init);
  const body = await res.json().catch(() => null);
  if (!res.ok) {
    const err = body?.error;
    throw new ApiError(err?.code ?? `http_${res.status}`,
                       err?.message ?? res.statusText, err?.field);
  }
  return body as T;
}

export class ApiClient {
  base: string;
  /** In-flight poll promises keyed by job id so concurrent pages share one loop. */
  private polls = new Map<string, Promise<JobStatus>>();

  constructor(base = '') {
    this.base = base;
  }

  listRuns(): Promise<RunSummary[]> {
    return request(`${this.base}/api/runs`);
  }

  getRun(runId: string): Promise<RunDetail> {
    return request(`${this.base}/api/runs/${encodeURIComponent(runId)}`);
  }

  getConfig(runId: string, configId: string): Promise<ConfigDetailData> {
    return request(`${this.base}/api/runs/${encodeURIComponent(runId)}` +
                   `/configs/${encodeURIComponent(configId)}`);
  }

  async createGroup(name: string, runIds: string[]): Promise<string> {
    const body = await request<{ group_id: string }>(`${this.base}/api/groups`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ name, run_ids: runIds }),
    });
    return body.group_id;
  }

  submitJob(plugin: string, params: Record<string, unknown>,
            runIds: string[]): Promise<JobStatus> {
    return request(`${this.base}/api/jobs`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ plugin, params, run_ids: runIds }),
    });
  }

  getJob(jobId: string): Promise<JobStatus> {
    return request(`${this.base}/api/jobs/${encodeURIComponent(jobId)}`);
  }

  /**
   * Poll a job until it reaches a terminal state. Concurrent calls for the
   * same job id share a single fetch loop.
   */
  pollJob(jobId: string, intervalMs = 250): Promise<JobStatus> {
    const existing = this.polls.get(jobId);
    if (existing) return existing;
    const loop = (async () => {
      try {
        for (;;) {
          const status = await this.getJob(jobId);
          if (status.state === 'finished' || status.state === 'failed') {
            return status;
          }
          await new Promise((r) => setTimeout(r, intervalMs));
        }
      } finally {
        this.polls.delete(jobId);
      }
    })();
    this.polls.set(jobId, loop);
    return loop;
  }

  /**
   * Submit and wait for the terminal status in one call. Submission only
   * returns {job_id, state}; the result/error always comes from a poll.
   */
  async runJob(plugin: string, params: Record<string, unknown>, runIds: string[],
               intervalMs = 250): Promise<JobStatus> {
    const submitted = await this.submitJob(plugin, params, runIds);
    return this.pollJob(submitted.job_id, intervalMs);
  }
}
