import { describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api.js';
import {
  StudioApp,
  applyMessageResponse,
  initialState,
  restoreFromHistory,
} from '../src/app.js';
import { serializeFrame } from '../src/frames.js';
import type {
  Frame,
  HistoryResponse,
  MessageResponse,
  StorySnapshot,
} from '../src/types.js';
import { EMPTY_SNAPSHOT } from '../src/types.js';

const CREATE_FRAME: Frame = {
  act: 'REQUEST',
  activity: 'CREATE_STORY',
  slots: { activity: ['skiing'], time: ['2018'] },
  refs: [],
};

const SNAPSHOT: StorySnapshot = {
  entries: [
    { clip_id: 'c1', effective_duration_s: 10 },
    { clip_id: 'c4', effective_duration_s: 7 },
  ],
  viewer_index: 0,
  last_search: { activity: ['skiing'], time: ['2018'] },
  shared: false,
};

function okResponse(): MessageResponse {
  return {
    utterance: 'Done, I created a story with 2 clips for you.',
    frame: CREATE_FRAME,
    api_call: 'REQUEST:CREATE_STORY [ activity = skiing, time = 2018 ] < >',
    execution_result: { status: 'OK', added: ['c1', 'c4'] },
    story_snapshot: SNAPSHOT,
    status: 'OK',
    annotation: {},
  };
}

function unparseableResponse(snapshot: StorySnapshot): MessageResponse {
  return {
    utterance: 'Sorry, I did not catch that, could you rephrase your request?',
    frame: null,
    api_call: null,
    execution_result: null,
    story_snapshot: snapshot,
    status: 'UNPARSEABLE',
    annotation: { parsed_activity: null },
  };
}

describe('applyMessageResponse', () => {
  it('appends both bubbles and mirrors the server snapshot', () => {
    const state = applyMessageResponse(
      initialState(),
      'Create a story of all skiing trips in 2018',
      okResponse(),
    );
    expect(state.chat.map((b) => b.speaker)).toEqual(['USER', 'ASSISTANT']);
    expect(state.snapshot).toEqual(SNAPSHOT);
    expect(state.inspector).toHaveLength(1);
    expect(state.inspector[0].linearFrame).toBe(
      'REQUEST:CREATE_STORY [ activity = skiing, time = 2018 ] < >',
    );
    expect(state.inspector[0].actActivity).toBe('REQUEST:CREATE_STORY');
    expect(state.inspector[0].status).toBe('OK');
    expect(state.pending).toBe(false);
  });

  it('keeps the strip unchanged on UNPARSEABLE and marks a clarification', () => {
    let state = applyMessageResponse(initialState(), 'create...', okResponse());
    const before = state.snapshot;
    state = applyMessageResponse(
      state,
      'blorp the wug',
      unparseableResponse(before),
    );
    expect(state.snapshot).toEqual(before);
    expect(state.chat.at(-1)?.clarification).toBe(true);
    expect(state.inspector.at(-1)?.linearFrame).toBeNull();
    expect(state.inspector.at(-1)?.status).toBe('UNPARSEABLE');
  });
});

describe('restoreFromHistory', () => {
  it('reproduces chat, inspector frames, and the final strip', () => {
    const history: HistoryResponse = {
      session_id: 's1',
      graph_id: 'g1',
      turns: [
        {
          turn_id: 1,
          speaker: 'USER',
          template_utterance: 'Create a story of all skiing trips in 2018',
          paraphrase: '',
          frame: CREATE_FRAME,
          story_snapshot: EMPTY_SNAPSHOT,
        },
        {
          turn_id: 2,
          speaker: 'ASSISTANT',
          template_utterance: 'Done, I created a story with 2 clips for you.',
          paraphrase: '',
          frame: {
            act: 'INFORM',
            activity: 'CREATE_STORY',
            slots: { status: 'ok', count: 2 },
            refs: [],
          },
          story_snapshot: SNAPSHOT,
          execution_result: { status: 'OK', added: ['c1', 'c4'] },
        },
        {
          turn_id: 3,
          speaker: 'USER',
          template_utterance: 'blorp the wug',
          paraphrase: '',
          frame: null,
          story_snapshot: SNAPSHOT,
        },
        {
          turn_id: 4,
          speaker: 'ASSISTANT',
          template_utterance: 'Sorry, I did not catch that.',
          paraphrase: '',
          frame: null,
          story_snapshot: SNAPSHOT,
          execution_result: null,
        },
      ],
    };
    const state = restoreFromHistory(history);
    expect(state.sessionId).toBe('s1');
    expect(state.chat).toHaveLength(4);
    expect(state.snapshot).toEqual(SNAPSHOT);
    expect(state.inspector).toHaveLength(2);
    // restored linear frame is byte-identical to the canonical serialization
    expect(state.inspector[0].linearFrame).toBe(serializeFrame(CREATE_FRAME));
    expect(state.inspector[1].status).toBe('UNPARSEABLE');
    expect(state.chat[3].clarification).toBe(true);
  });
});

type Deferred<T> = { promise: Promise<T>; resolve: (value: T) => void };

function deferred<T>(): Deferred<T> {
  let resolve!: (value: T) => void;
  const promise = new Promise<T>((r) => (resolve = r));
  return { promise, resolve };
}

function jsonResponse(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), { status });
}

describe('StudioApp', () => {
  it('allows only one in-flight message', async () => {
    const gate = deferred<Response>();
    let calls = 0;
    const client = new ApiClient('', async (url, init) => {
      if (url === '/sessions' && init?.method === 'POST') {
        return jsonResponse({ session_id: 's1', graph_id: 'g1', n_clips: 2 });
      }
      if (url.endsWith('/messages')) {
        calls += 1;
        return gate.promise;
      }
      return jsonResponse({ id: url.split('/').pop() });
    });
    const app = new StudioApp(client);
    await app.start();

    const first = app.send('Create a story of all skiing trips in 2018');
    expect(app.getState().pending).toBe(true);
    const second = await app.send('Remove the first clip from the story.');
    expect(second).toBe(false);
    expect(calls).toBe(1);

    gate.resolve(jsonResponse(okResponse()));
    expect(await first).toBe(true);
    expect(app.getState().pending).toBe(false);
    expect(app.getState().chat).toHaveLength(2);
  });

  it('surfaces failures as a toast and preserves the draft', async () => {
    const client = new ApiClient('', async (url, init) => {
      if (url === '/sessions' && init?.method === 'POST') {
        return jsonResponse({ session_id: 's1', graph_id: 'g1', n_clips: 2 });
      }
      return jsonResponse({ detail: 'boom' }, 500);
    });
    const app = new StudioApp(client);
    await app.start();
    const sent = await app.send('Share this story with family once it looks good.');
    expect(sent).toBe(false);
    expect(app.getState().toast).toContain('boom');
    expect(app.getState().draft).toBe(
      'Share this story with family once it looks good.',
    );
    expect(app.getState().chat).toHaveLength(0);
    app.dismissToast();
    expect(app.getState().toast).toBeNull();
  });

  it('fetches clip metadata for new snapshot entries once', async () => {
    const clipRequests: string[] = [];
    const client = new ApiClient('', async (url, init) => {
      if (url === '/sessions' && init?.method === 'POST') {
        return jsonResponse({ session_id: 's1', graph_id: 'g1', n_clips: 2 });
      }
      if (url.endsWith('/messages')) return jsonResponse(okResponse());
      if (url.startsWith('/clips/')) {
        clipRequests.push(url);
        return jsonResponse({
          id: url.split('/').pop(),
          activity: 'skiing',
          time: '2018',
          location: 'mountain',
          objects: [],
          participants: [],
          attributes: [],
          duration_s: 10,
        });
      }
      throw new Error(`unexpected ${url}`);
    });
    const app = new StudioApp(client);
    await app.start();
    await app.send('Create a story of all skiing trips in 2018');
    await app.send('Create a story of all skiing trips in 2018');
    expect(clipRequests.sort()).toEqual(['/clips/c1', '/clips/c4']);
    expect(app.clipCache().get('c1')?.activity).toBe('skiing');
  });
});
