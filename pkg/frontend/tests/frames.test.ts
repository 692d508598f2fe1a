import { describe, expect, it } from 'vitest';

import { flatClipIds, serializeFrame } from '../src/frames.js';
import type { Frame } from '../src/types.js';

describe('serializeFrame', () => {
  it('matches the server canonical form byte for byte', () => {
    const frame: Frame = {
      act: 'REQUEST',
      activity: 'CREATE_STORY',
      slots: { time: ['2018'], activity: ['skiing'] },
      refs: [],
    };
    expect(serializeFrame(frame)).toBe(
      'REQUEST:CREATE_STORY [ activity = skiing, time = 2018 ] < >',
    );
  });

  it('renders empty sections and clip ids like the server', () => {
    const frame: Frame = {
      act: 'REQUEST',
      activity: 'REMOVE_CLIPS',
      slots: {},
      refs: [
        { clip_ids: ['c2', 'c4'], role: 'TARGET', mention_type: 'ADJECTIVAL' },
      ],
    };
    expect(serializeFrame(frame)).toBe(
      'REQUEST:REMOVE_CLIPS [ ] < clip: c2, c4 >',
    );
  });

  it('repeats multi-valued slots and keeps sorted key order', () => {
    const frame: Frame = {
      act: 'REQUEST',
      activity: 'ADD_CLIPS',
      slots: { time: ['2018'], attribute: ['snowy', 'sunset'], position: 'FIRST' },
      refs: [],
    };
    expect(serializeFrame(frame)).toBe(
      'REQUEST:ADD_CLIPS [ attribute = snowy, attribute = sunset, ' +
        'position = FIRST, time = 2018 ] < >',
    );
  });

  it('renders integer slots without quoting', () => {
    const frame: Frame = {
      act: 'INFORM',
      activity: 'REMOVE_CLIPS',
      slots: { status: 'ok', count: 1 },
      refs: [],
    };
    expect(serializeFrame(frame)).toBe(
      'INFORM:REMOVE_CLIPS [ count = 1, status = ok ] < >',
    );
  });
});

describe('flatClipIds', () => {
  it('orders by role (TARGET, ANCHOR, REFERENCE) and deduplicates', () => {
    const frame: Frame = {
      act: 'REQUEST',
      activity: 'REPLACE_CLIPS',
      slots: {},
      refs: [
        { clip_ids: ['c9'], role: 'REFERENCE', mention_type: 'ORDINAL' },
        { clip_ids: ['c3', 'c9'], role: 'TARGET', mention_type: 'ADJECTIVAL' },
      ],
    };
    expect(flatClipIds(frame)).toEqual(['c3', 'c9']);
  });
});
