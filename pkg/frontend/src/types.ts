// Payload types mirroring the montage-dialog HTTP API. Field names match
// the server's JSON exactly; don't rename without changing both sides.

export type Act = 'REQUEST' | 'INFORM';

export type Activity =
  | 'CREATE_STORY'
  | 'ADD_CLIPS'
  | 'REMOVE_CLIPS'
  | 'REPLACE_CLIPS'
  | 'REORDER_CLIPS'
  | 'REFINE_SEARCH'
  | 'MODIFY_DURATION'
  | 'SHARE_STORY';

export const ACTIVITIES: Activity[] = [
  'CREATE_STORY',
  'ADD_CLIPS',
  'REMOVE_CLIPS',
  'REPLACE_CLIPS',
  'REORDER_CLIPS',
  'REFINE_SEARCH',
  'MODIFY_DURATION',
  'SHARE_STORY',
];

export type Role = 'TARGET' | 'ANCHOR' | 'REFERENCE';

// Slot values are strings, string arrays (multi-valued constraints), or
// integers (duration_s, count).
export type SlotValue = string | number | string[];

export interface ClipRef {
  clip_ids: string[];
  role: Role;
  mention_type: string;
  mention_text?: string;
}

export interface Frame {
  act: Act;
  activity: Activity;
  slots: Record<string, SlotValue>;
  refs: ClipRef[];
}

export interface StoryEntry {
  clip_id: string;
  effective_duration_s: number;
}

export interface StorySnapshot {
  entries: StoryEntry[];
  viewer_index: number | null;
  last_search: Record<string, string[]>;
  shared: boolean;
}

export interface Clip {
  id: string;
  activity: string;
  time: string;
  location: string;
  objects: string[];
  participants: string[];
  attributes: string[];
  duration_s: number;
  graph_id?: string;
}

export type MessageStatus = 'OK' | 'NO_RESULTS' | 'INVALID_REF' | 'UNPARSEABLE';

export interface MentionAnnotation {
  text: string;
  mention_type: string;
  role: Role;
}

export interface Annotation {
  mentions?: MentionAnnotation[];
  parsed_activity?: string | null;
  resolved?: string[][];
  validation_error?: string;
}

export interface ExecutionResult {
  status: string;
  added?: string[];
  removed?: string[];
  message_slots?: Record<string, SlotValue>;
}

export interface MessageResponse {
  utterance: string;
  frame: Frame | null;
  api_call: string | null;
  execution_result: ExecutionResult | null;
  story_snapshot: StorySnapshot;
  status: MessageStatus;
  annotation: Annotation;
}

export interface SessionInfo {
  session_id: string;
  graph_id: string;
  n_clips: number;
}

export interface HistoryTurn {
  turn_id: number;
  speaker: 'USER' | 'ASSISTANT';
  template_utterance: string;
  paraphrase: string;
  frame: Frame | null;
  story_snapshot: StorySnapshot;
  execution_result?: ExecutionResult | null;
}

export interface HistoryResponse {
  session_id: string;
  graph_id: string;
  turns: HistoryTurn[];
}

export const EMPTY_SNAPSHOT: StorySnapshot = {
  entries: [],
  viewer_index: null,
  last_search: {},
  shared: false,
};
