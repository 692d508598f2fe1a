// Structured composer: turns form selections into the canonical template
// text the server's rule-based parser is guaranteed to understand. The
// strings here mirror the server's deterministic template choice exactly,
// so a composed request always round-trips through the NLU.

import type { Activity } from './types.js';

export const CONSTRAINT_KEYS = [
  'activity',
  'time',
  'location',
  'object',
  'participant',
  'attribute',
] as const;

export type ConstraintKey = (typeof CONSTRAINT_KEYS)[number];

export type Constraints = Partial<Record<ConstraintKey, string[]>>;

export interface ComposerSelection {
  activity: Activity;
  constraints?: Constraints;
  /** 1-based position of the selected clip card. */
  targetPosition?: number;
  /** Current strip length; needed to express from-the-end ordinals. */
  stripSize?: number;
  position?: 'first' | 'last';
  durationSeconds?: number;
  durationChange?: 'shorter' | 'longer';
  shareTo?: string;
}

export type ComposeResult =
  | { ok: true; text: string }
  | { ok: false; hints: Record<string, string> };

const ORDINAL_WORDS: Record<number, string> = {
  1: 'first',
  2: 'second',
  3: 'third',
  4: 'fourth',
  5: 'fifth',
  6: 'sixth',
  7: 'seventh',
  8: 'eighth',
};

/** Surface text for a clip card at `position` in a strip of `size`. */
export function ordinalMention(position: number, size: number): string | null {
  if (position < 1 || position > size) return null;
  if (position === size) return 'the last clip';
  if (position === size - 1 && position > 8) {
    return 'the second to the last clip';
  }
  const word = ORDINAL_WORDS[position];
  return word ? `the ${word} clip` : null;
}

export function constraintPhrase(constraints: Constraints): string {
  const parts: string[] = [];
  const activities = constraints.activity ?? [];
  if (activities.length) {
    parts.push(`all ${activities.join(' and ')} trips`);
  } else {
    parts.push('everything');
  }
  if (constraints.time?.length) {
    parts.push('in ' + constraints.time.join(' and '));
  }
  if (constraints.location?.length) {
    parts.push('at the ' + constraints.location.join(' and the '));
  }
  if (constraints.object?.length) {
    parts.push('with ' + constraints.object.join(' and '));
  }
  if (constraints.participant?.length) {
    parts.push('featuring ' + constraints.participant.join(' and '));
  }
  if (constraints.attribute?.length) {
    parts.push('that look ' + constraints.attribute.join(' and '));
  }
  return parts.join(' ');
}

function hasConstraints(constraints: Constraints | undefined): boolean {
  if (!constraints) return false;
  return CONSTRAINT_KEYS.some((key) => (constraints[key] ?? []).length > 0);
}

function requireTarget(
  selection: ComposerSelection,
  hints: Record<string, string>,
): string | null {
  if (selection.targetPosition == null || selection.stripSize == null) {
    hints.target = 'select a clip card first';
    return null;
  }
  const mention = ordinalMention(selection.targetPosition, selection.stripSize);
  if (mention === null) {
    hints.target =
      'that position has no spoken ordinal; pick a clip nearer either end';
  }
  return mention;
}

export function composeStructuredRequest(
  selection: ComposerSelection,
): ComposeResult {
  const hints: Record<string, string> = {};
  const constraints = selection.constraints ?? {};
  let text = '';

  switch (selection.activity) {
    case 'CREATE_STORY': {
      if (!hasConstraints(constraints)) {
        hints.constraints = 'pick at least one search filter';
        break;
      }
      text = `Create a story of ${constraintPhrase(constraints)}`;
      break;
    }
    case 'ADD_CLIPS': {
      if (!hasConstraints(constraints)) {
        hints.constraints = 'pick at least one search filter';
        break;
      }
      const phrase = constraintPhrase(constraints);
      if (selection.position === 'first') {
        text = `Add ${phrase} at the beginning of the story.`;
      } else if (selection.position === 'last') {
        text = `Add ${phrase} at the end of the story.`;
      } else {
        text = `Add ${phrase} to the story.`;
      }
      break;
    }
    case 'REMOVE_CLIPS': {
      const mention = requireTarget(selection, hints);
      if (mention) text = `Remove ${mention} from the story.`;
      break;
    }
    case 'REPLACE_CLIPS': {
      const mention = requireTarget(selection, hints);
      if (!hasConstraints(constraints)) {
        hints.constraints = 'pick filters describing the replacement';
      }
      if (mention && !hints.constraints) {
        text = `Replace ${mention} with ${constraintPhrase(constraints)}.`;
      }
      break;
    }
    case 'REORDER_CLIPS': {
      const mention = requireTarget(selection, hints);
      if (selection.position !== 'first' && selection.position !== 'last') {
        hints.position = 'choose front or end';
      }
      if (mention && !hints.position) {
        const pos =
          selection.position === 'first' ? 'to the front' : 'to the end';
        text = `Move ${mention} ${pos} of the story.`;
      }
      break;
    }
    case 'REFINE_SEARCH': {
      if (!hasConstraints(constraints)) {
        hints.constraints = 'pick at least one search filter';
        break;
      }
      text = `Actually, only keep ${constraintPhrase(constraints)} in the story.`;
      break;
    }
    case 'MODIFY_DURATION': {
      const mention = requireTarget(selection, hints);
      const seconds = selection.durationSeconds;
      const change = selection.durationChange;
      if (seconds == null && change == null) {
        hints.duration = 'set a length in seconds or choose shorter/longer';
      } else if (seconds != null && (!Number.isInteger(seconds) || seconds < 1)) {
        hints.duration = 'length must be a whole number of seconds, at least 1';
      }
      if (mention && !hints.duration) {
        text =
          seconds != null
            ? `Set ${mention} to exactly ${seconds} seconds for me.`
            : `Make ${mention} a bit ${change} in the story.`;
      }
      break;
    }
    case 'SHARE_STORY': {
      if (!selection.shareTo || !selection.shareTo.trim()) {
        hints.shareTo = 'say who should receive the story';
        break;
      }
      text = `Share this story with ${selection.shareTo.trim()} once it looks good.`;
      break;
    }
  }

  if (Object.keys(hints).length) return { ok: false, hints };
  return { ok: true, text };
}
