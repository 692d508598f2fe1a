// Typed client for the montage-dialog session server. One method per
// endpoint, no extras: the UI consumes the HTTP API verbatim.

import type {
  Clip,
  HistoryResponse,
  MessageResponse,
  SessionInfo,
  StorySnapshot,
} from './types.js';

export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = '',
    private readonly fetchImpl: FetchLike = (input, init) =>
      fetch(input, init),
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers: body !== undefined ? { 'Content-Type': 'application/json' } : {},
      body: body !== undefined ? JSON.stringify(body) : undefined,
    });
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const payload = await response.json();
        if (payload && typeof payload.detail === 'string') {
          detail = payload.detail;
        }
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  createSession(graphId?: string): Promise<SessionInfo> {
    return this.request('POST', '/sessions', graphId ? { graph_id: graphId } : {});
  }

  sendMessage(sessionId: string, text: string): Promise<MessageResponse> {
    return this.request('POST', `/sessions/${sessionId}/messages`, { text });
  }

  getStory(sessionId: string): Promise<StorySnapshot> {
    return this.request('GET', `/sessions/${sessionId}/story`);
  }

  getHistory(sessionId: string): Promise<HistoryResponse> {
    return this.request('GET', `/sessions/${sessionId}/history`);
  }

  getClip(clipId: string): Promise<Clip> {
    return this.request('GET', `/clips/${clipId}`);
  }

  deleteSession(sessionId: string): Promise<{ deleted: string }> {
    return this.request('DELETE', `/sessions/${sessionId}`);
  }
}
