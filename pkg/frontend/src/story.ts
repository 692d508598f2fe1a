// Story strip view model. The strip never mutates state locally: cards are
// derived 1:1 from the latest server snapshot, in snapshot order.

import type { Clip, StorySnapshot } from './types.js';

export interface ClipCard {
  clip_id: string;
  activity: string;
  time: string;
  location: string;
  attributes: string[];
  effective_duration_s: number;
  isViewer: boolean;
}

export interface StoryView {
  cards: ClipCard[];
  shared: boolean;
  totalDurationS: number;
}

const UNKNOWN_CLIP: Omit<Clip, 'id'> = {
  activity: '?',
  time: '?',
  location: '?',
  objects: [],
  participants: [],
  attributes: [],
  duration_s: 0,
};

export function buildStoryView(
  snapshot: StorySnapshot,
  clips: Map<string, Clip>,
): StoryView {
  const cards = snapshot.entries.map((entry, index) => {
    const clip = clips.get(entry.clip_id) ?? {
      id: entry.clip_id,
      ...UNKNOWN_CLIP,
    };
    return {
      clip_id: entry.clip_id,
      activity: clip.activity,
      time: clip.time,
      location: clip.location,
      attributes: clip.attributes,
      effective_duration_s: entry.effective_duration_s,
      isViewer: snapshot.viewer_index === index,
    };
  });
  return {
    cards,
    shared: snapshot.shared,
    totalDurationS: cards.reduce((s, c) => s + c.effective_duration_s, 0),
  };
}
