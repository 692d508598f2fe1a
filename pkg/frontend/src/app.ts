// Session state and orchestration. All story mutations come from server
// snapshots; this module only records what the server said. One message may
// be in flight per session (send() refuses while pending), matching the
// server's per-session serialization.

import { ApiClient } from './api.js';
import { describeSlots, flatClipIds, serializeFrame } from './frames.js';
import type {
  Clip,
  Frame,
  HistoryResponse,
  MessageResponse,
  StorySnapshot,
} from './types.js';
import { EMPTY_SNAPSHOT } from './types.js';

export interface ChatBubble {
  speaker: 'USER' | 'ASSISTANT';
  text: string;
  clarification: boolean;
}

export interface TurnInspectorEntry {
  utterance: string;
  /** Canonical linear frame, byte-identical to the server's api_call. */
  linearFrame: string | null;
  actActivity: string | null;
  slots: string;
  resolvedClipIds: string[];
  status: string;
}

export interface AppState {
  sessionId: string | null;
  graphId: string | null;
  chat: ChatBubble[];
  inspector: TurnInspectorEntry[];
  snapshot: StorySnapshot;
  pending: boolean;
  toast: string | null;
  /** Draft text preserved for retry after a failed send. */
  draft: string;
}

export function initialState(): AppState {
  return {
    sessionId: null,
    graphId: null,
    chat: [],
    inspector: [],
    snapshot: EMPTY_SNAPSHOT,
    pending: false,
    toast: null,
    draft: '',
  };
}

function inspectorEntry(
  utterance: string,
  frame: Frame | null,
  linearFrame: string | null,
  status: string,
): TurnInspectorEntry {
  return {
    utterance,
    linearFrame,
    actActivity: frame ? `${frame.act}:${frame.activity}` : null,
    slots: frame ? describeSlots(frame) : '',
    resolvedClipIds: frame ? flatClipIds(frame) : [],
    status,
  };
}

/** Fold one message round trip into the state. Pure. */
export function applyMessageResponse(
  state: AppState,
  userText: string,
  response: MessageResponse,
): AppState {
  const chat = [
    ...state.chat,
    { speaker: 'USER' as const, text: userText, clarification: false },
    {
      speaker: 'ASSISTANT' as const,
      text: response.utterance,
      clarification:
        response.status === 'UNPARSEABLE' || response.status === 'INVALID_REF',
    },
  ];
  const inspector = [
    ...state.inspector,
    inspectorEntry(userText, response.frame, response.api_call, response.status),
  ];
  return {
    ...state,
    chat,
    inspector,
    snapshot: response.story_snapshot,
    pending: false,
    toast: null,
    draft: '',
  };
}

/** Rebuild the full state from GET /history. Pure. */
export function restoreFromHistory(history: HistoryResponse): AppState {
  const state = initialState();
  state.sessionId = history.session_id;
  state.graphId = history.graph_id;
  let lastUser: { text: string; frame: Frame | null } | null = null;
  for (const turn of history.turns) {
    if (turn.speaker === 'USER') {
      lastUser = { text: turn.template_utterance, frame: turn.frame };
      state.chat.push({
        speaker: 'USER',
        text: turn.template_utterance,
        clarification: false,
      });
    } else {
      const status = turn.frame
        ? (turn.execution_result?.status ?? 'OK')
        : 'UNPARSEABLE';
      state.chat.push({
        speaker: 'ASSISTANT',
        text: turn.template_utterance,
        clarification: status === 'UNPARSEABLE' || status === 'INVALID_REF',
      });
      if (lastUser) {
        state.inspector.push(
          inspectorEntry(
            lastUser.text,
            lastUser.frame,
            lastUser.frame ? serializeFrame(lastUser.frame) : null,
            status,
          ),
        );
        lastUser = null;
      }
      state.snapshot = turn.story_snapshot;
    }
  }
  return state;
}

export type Listener = (state: AppState) => void;

export class StudioApp {
  private state: AppState = initialState();
  private readonly clips = new Map<string, Clip>();
  private readonly listeners: Listener[] = [];

  constructor(private readonly client: ApiClient) {}

  getState(): AppState {
    return this.state;
  }

  clipCache(): Map<string, Clip> {
    return this.clips;
  }

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private setState(next: AppState): void {
    this.state = next;
    for (const listener of this.listeners) listener(next);
  }

  async start(graphId?: string): Promise<void> {
    const info = await this.client.createSession(graphId);
    const state = initialState();
    state.sessionId = info.session_id;
    state.graphId = info.graph_id;
    this.setState(state);
  }

  /** Reload an existing session (page refresh) from the server log. */
  async restore(sessionId: string): Promise<void> {
    const history = await this.client.getHistory(sessionId);
    const state = restoreFromHistory(history);
    await this.fetchMissingClips(state.snapshot);
    this.setState(state);
  }

  /**
   * Send one user message. Returns false when a message is already in
   * flight or no session is active; the caller keeps the input box as-is.
   */
  async send(text: string): Promise<boolean> {
    if (this.state.pending || !this.state.sessionId) return false;
    const trimmed = text.trim();
    if (!trimmed) return false;
    this.setState({ ...this.state, pending: true, draft: trimmed });
    try {
      const response = await this.client.sendMessage(
        this.state.sessionId,
        trimmed,
      );
      await this.fetchMissingClips(response.story_snapshot);
      this.setState(applyMessageResponse(this.state, trimmed, response));
      return true;
    } catch (error) {
      // non-blocking toast; the draft stays so the user can retry
      this.setState({
        ...this.state,
        pending: false,
        toast: error instanceof Error ? error.message : String(error),
      });
      return false;
    }
  }

  dismissToast(): void {
    if (this.state.toast) this.setState({ ...this.state, toast: null });
  }

  private async fetchMissingClips(snapshot: StorySnapshot): Promise<void> {
    const missing = snapshot.entries
      .map((entry) => entry.clip_id)
      .filter((id) => !this.clips.has(id));
    for (const id of missing) {
      try {
        this.clips.set(id, await this.client.getClip(id));
      } catch {
        // card falls back to id-only rendering
      }
    }
  }
}
