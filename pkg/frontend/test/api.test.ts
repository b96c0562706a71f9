import { afterEach, describe, expect, it, vi } from 'vitest';

import { ApiClient, ApiError } from '../src/api.js';
import type { JobStatus } from '../src/types.js';

type Call = { url: string; body?: unknown };

/** fetch stub returning queued responses and recording every call. */
function stubFetch(responses: (() => unknown)[]): Call[] {
  const calls: Call[] = [];
  let i = 0;
  vi.stubGlobal('fetch', async (url: string, init?: RequestInit) => {
    calls.push({ url, body: init?.body ? JSON.parse(init.body as string) : undefined });
    const next = responses[Math.min(i, responses.length - 1)];
    i += 1;
    const payload = next();
    if (payload instanceof Response) return payload;
    return new Response(JSON.stringify(payload), {
      status: 200, headers: { 'content-type': 'application/json' },
    });
  });
  return calls;
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe('job polling', () => {
  it('polls until finished and stops on the terminal state', async () => {
    const finished: JobStatus = {
      job_id: 'j1', state: 'finished',
      result: { plugin: 'importances', run_ids: ['demo'], params: {}, data: {} },
    };
    const calls = stubFetch([
      () => ({ job_id: 'j1', state: 'queued' }),
      () => ({ job_id: 'j1', state: 'running' }),
      () => ({ job_id: 'j1', state: 'running' }),
      () => finished,
    ]);
    const api = new ApiClient('');
    const status = await api.runJob('importances', { objective: 'loss' }, ['demo'], 1);
    expect(status.state).toBe('finished');
    expect(status.result?.plugin).toBe('importances');
    // one POST plus three polls; nothing after the terminal response
    expect(calls).toHaveLength(4);
    expect(calls[0].url).toBe('/api/jobs');
    expect(calls[0].body).toEqual({
      plugin: 'importances', params: { objective: 'loss' }, run_ids: ['demo'],
    });
  });

  it('a failed job resolves with the service error', async () => {
    stubFetch([
      () => ({ job_id: 'j2', state: 'queued' }),
      () => ({ job_id: 'j2', state: 'failed', error: 'EmptySelectionError: no trials' }),
    ]);
    const api = new ApiClient('');
    const status = await api.runJob('footprint', {}, ['demo'], 1);
    expect(status.state).toBe('failed');
    expect(status.error).toContain('EmptySelectionError');
  });

  it('concurrent polls for one job share a single loop', async () => {
    let polls = 0;
    stubFetch([
      () => { polls += 1; return { job_id: 'j3', state: polls < 3 ? 'running' : 'finished' }; },
    ]);
    const api = new ApiClient('');
    const a = api.pollJob('j3', 1);
    const b = api.pollJob('j3', 1);
    expect(b).toBe(a);
    const [ra, rb] = await Promise.all([a, b]);
    expect(ra.state).toBe('finished');
    expect(rb).toBe(ra);
    expect(polls).toBe(3);
  });

  it('param changes submit a new job request', async () => {
    const calls = stubFetch([() => ({ job_id: 'x', state: 'finished' })]);
    const api = new ApiClient('');
    await api.submitJob('pdp', { hp: 'lr' }, ['demo']);
    await api.submitJob('pdp', { hp: 'depth' }, ['demo']);
    expect(calls).toHaveLength(2);
    expect(calls[0].body).not.toEqual(calls[1].body);
  });
});

describe('error decoding', () => {
  it('service errors become typed ApiError values', async () => {
    stubFetch([
      () => new Response(JSON.stringify({
        error: { code: 'not_found', message: 'unknown run: ghost', field: 'run' },
      }), { status: 404, headers: { 'content-type': 'application/json' } }),
    ]);
    const api = new ApiClient('');
    const err = await api.getRun('ghost').catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.code).toBe('not_found');
    expect(err.field).toBe('run');
    expect(err.message).toContain('ghost');
  });

  it('non-json failures still throw', async () => {
    stubFetch([() => new Response('boom', { status: 500 })]);
    const api = new ApiClient('');
    const err = await api.listRuns().catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.code).toBe('http_500');
  });
});
