import { describe, expect, it } from 'vitest';

import { ApiClient, ApiError } from '../src/api.js';

interface Recorded {
  url: string;
  method?: string;
  body?: string;
}

function fakeFetch(
  responses: Array<{ status?: number; payload: unknown }>,
  log: Recorded[],
) {
  let call = 0;
  return async (url: string, init?: RequestInit) => {
    log.push({ url, method: init?.method, body: init?.body as string });
    const { status = 200, payload } = responses[call++];
    return new Response(JSON.stringify(payload), { status });
  };
}

describe('ApiClient', () => {
  it('hits the documented endpoints with the right payloads', async () => {
    const log: Recorded[] = [];
    const client = new ApiClient(
      'http://host',
      fakeFetch(
        [
          { payload: { session_id: 's1', graph_id: 'g1', n_clips: 3 } },
          { payload: { utterance: 'ok' } },
          { payload: { entries: [] } },
          { payload: { session_id: 's1', graph_id: 'g1', turns: [] } },
          { payload: { id: 'c1' } },
          { payload: { deleted: 's1' } },
        ],
        log,
      ),
    );
    await client.createSession('g1');
    await client.sendMessage('s1', 'hello');
    await client.getStory('s1');
    await client.getHistory('s1');
    await client.getClip('c1');
    await client.deleteSession('s1');

    expect(log.map((r) => `${r.method} ${r.url}`)).toEqual([
      'POST http://host/sessions',
      'POST http://host/sessions/s1/messages',
      'GET http://host/sessions/s1/story',
      'GET http://host/sessions/s1/history',
      'GET http://host/clips/c1',
      'DELETE http://host/sessions/s1',
    ]);
    expect(JSON.parse(log[0].body!)).toEqual({ graph_id: 'g1' });
    expect(JSON.parse(log[1].body!)).toEqual({ text: 'hello' });
  });

  it('raises ApiError with the server detail on failure', async () => {
    const client = new ApiClient(
      '',
      fakeFetch([{ status: 404, payload: { detail: "unknown session 'x'" } }], []),
    );
    await expect(client.getStory('x')).rejects.toMatchObject({
      status: 404,
      detail: "unknown session 'x'",
    });
    await expect(
      new ApiClient('', fakeFetch([{ status: 404, payload: { detail: 'no' } }], []))
        .getStory('x'),
    ).rejects.toBeInstanceOf(ApiError);
  });
});
