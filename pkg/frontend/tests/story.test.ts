import { describe, expect, it } from 'vitest';

import { buildStoryView } from '../src/story.js';
import type { Clip, StorySnapshot } from '../src/types.js';

const CLIPS = new Map<string, Clip>([
  [
    'c1',
    {
      id: 'c1',
      activity: 'skiing',
      time: '2018',
      location: 'mountain',
      objects: ['snowboard'],
      participants: [],
      attributes: ['sunset'],
      duration_s: 30,
    },
  ],
  [
    'c4',
    {
      id: 'c4',
      activity: 'surfing',
      time: '2019',
      location: 'beach',
      objects: [],
      participants: ['alice'],
      attributes: [],
      duration_s: 12,
    },
  ],
]);

describe('buildStoryView', () => {
  it('mirrors the snapshot order and viewer highlight exactly', () => {
    const snapshot: StorySnapshot = {
      entries: [
        { clip_id: 'c4', effective_duration_s: 8 },
        { clip_id: 'c1', effective_duration_s: 20 },
      ],
      viewer_index: 1,
      last_search: {},
      shared: true,
    };
    const view = buildStoryView(snapshot, CLIPS);
    expect(view.cards.map((c) => c.clip_id)).toEqual(['c4', 'c1']);
    expect(view.cards[0].activity).toBe('surfing');
    expect(view.cards[0].isViewer).toBe(false);
    expect(view.cards[1].isViewer).toBe(true);
    // effective duration comes from the snapshot, not the clip metadata
    expect(view.cards[1].effective_duration_s).toBe(20);
    expect(view.shared).toBe(true);
    expect(view.totalDurationS).toBe(28);
  });

  it('falls back gracefully when clip metadata is missing', () => {
    const snapshot: StorySnapshot = {
      entries: [{ clip_id: 'c99', effective_duration_s: 5 }],
      viewer_index: null,
      last_search: {},
      shared: false,
    };
    const view = buildStoryView(snapshot, CLIPS);
    expect(view.cards[0].clip_id).toBe('c99');
    expect(view.cards[0].activity).toBe('?');
    expect(view.cards[0].isViewer).toBe(false);
  });

  it('renders an empty strip for an empty snapshot', () => {
    const view = buildStoryView(
      { entries: [], viewer_index: null, last_search: {}, shared: false },
      CLIPS,
    );
    expect(view.cards).toEqual([]);
    expect(view.totalDurationS).toBe(0);
  });
});
