import { afterEach, describe, expect, it, vi } from 'vitest';

import { ApiClient, ApiError } from '../src/api';

function mockFetch(handler: (url: string, init?: RequestInit) => Response | Promise<Response>) {
  const spy = vi.fn((input: RequestInfo | URL, init?: RequestInit) =>
    Promise.resolve(handler(String(input), init)),
  );
  vi.stubGlobal('fetch', spy);
  return spy;
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe('api client', () => {
  it('lists contexts', async () => {
    mockFetch(() => new Response(JSON.stringify([{ id: 'office' }]), { status: 200 }));
    const api = new ApiClient();
    const contexts = await api.listContexts();
    expect(contexts[0].id).toBe('office');
  });

  it('surfaces 415 upload rejection as ApiError with detail', async () => {
    mockFetch(
      () => new Response(JSON.stringify({ detail: 'designs must be PNG' }), { status: 415 }),
    );
    const api = new ApiClient();
    await expect(api.uploadDesign(new Blob([new Uint8Array([1, 2, 3])]))).rejects.toMatchObject({
      status: 415,
      detail: 'designs must be PNG',
    });
  });

  it('surfaces 413 oversize rejection', async () => {
    mockFetch(() => new Response(JSON.stringify({ detail: 'too big' }), { status: 413 }));
    const api = new ApiClient();
    await expect(api.uploadDesign(new Blob([new Uint8Array(10)]))).rejects.toBeInstanceOf(ApiError);
  });

  it('posts job specs as JSON', async () => {
    const spy = mockFetch(() => new Response(JSON.stringify({ id: 'job42' }), { status: 201 }));
    const api = new ApiClient();
    const id = await api.createJob({
      context_id: 'office',
      profile_id: 'hl2',
      design_id: 'd1',
      lux: 500,
    });
    expect(id).toBe('job42');
    const [url, init] = spy.mock.calls[0];
    expect(String(url)).toBe('/api/jobs');
    expect(init?.method).toBe('POST');
    expect(JSON.parse(String(init?.body))).toMatchObject({ context_id: 'office', lux: 500 });
  });

  it('passes the abort signal through to preview fetches', async () => {
    const spy = mockFetch(() => new Response(new Blob([new Uint8Array(4)]), { status: 200 }));
    const api = new ApiClient();
    const controller = new AbortController();
    await api.preview(
      { context_id: 'c', profile_id: 'p', design_id: 'd', lux: 100, frame_index: 1 },
      controller.signal,
    );
    expect(spy.mock.calls[0][1]?.signal).toBe(controller.signal);
  });

  it('builds job frame urls', () => {
    const api = new ApiClient();
    expect(api.jobFrameUrl('j1', 7)).toBe('/api/jobs/j1/frames/7.png');
  });

  it('waitForJob polls to done', async () => {
    let polls = 0;
    mockFetch(() => {
      polls += 1;
      const state = polls >= 3 ? 'done' : 'running';
      return new Response(
        JSON.stringify({ id: 'j', state, progress: { done: polls, total: 3 }, error: null, spec: {} }),
        { status: 200 },
      );
    });
    const api = new ApiClient();
    const seen: string[] = [];
    const job = await api.waitForJob('j', (j) => seen.push(j.state), 1);
    expect(job.state).toBe('done');
    expect(polls).toBe(3);
    expect(seen).toEqual(['running', 'running', 'done']);
  });

  it('waitForJob rejects on failed jobs', async () => {
    mockFetch(
      () =>
        new Response(
          JSON.stringify({ id: 'j', state: 'failed', progress: { done: 0, total: 3 }, error: 'boom', spec: {} }),
          { status: 200 },
        ),
    );
    const api = new ApiClient();
    await expect(api.waitForJob('j', undefined, 1)).rejects.toMatchObject({ detail: 'boom' });
  });
});
