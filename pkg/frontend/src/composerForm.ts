// Declarative field lists for the structured composer form, plus the
// form-to-selection reader used by main.ts. Kept separate from the DOM so
// the mapping is unit-testable.

import type { ComposerSelection, ConstraintKey } from './composer.js';
import { CONSTRAINT_KEYS } from './composer.js';
import type { Activity } from './types.js';

export type ComposerField =
  | { kind: 'text'; name: string; label: string; placeholder?: string }
  | { kind: 'select'; name: string; label: string; options: string[] };

const CONSTRAINT_FIELDS: ComposerField[] = CONSTRAINT_KEYS.map((key) => ({
  kind: 'text',
  name: key,
  label: key,
  placeholder: 'comma-separated',
}));

const POSITION_FIELD: ComposerField = {
  kind: 'select',
  name: 'position',
  label: 'position',
  options: ['first', 'last'],
};

export const ACTIVITY_FIELDS: Record<Activity, ComposerField[]> = {
  CREATE_STORY: CONSTRAINT_FIELDS,
  ADD_CLIPS: [...CONSTRAINT_FIELDS, POSITION_FIELD],
  REMOVE_CLIPS: [],
  REPLACE_CLIPS: CONSTRAINT_FIELDS,
  REORDER_CLIPS: [POSITION_FIELD],
  REFINE_SEARCH: CONSTRAINT_FIELDS,
  MODIFY_DURATION: [
    { kind: 'text', name: 'durationSeconds', label: 'seconds' },
    {
      kind: 'select',
      name: 'durationChange',
      label: 'or change',
      options: ['shorter', 'longer'],
    },
  ],
  SHARE_STORY: [{ kind: 'text', name: 'shareTo', label: 'share with' }],
};

interface FormLike {
  elements: { namedItem(name: string): unknown };
}

function fieldValue(form: FormLike, name: string): string {
  const element = form.elements.namedItem(name) as { value?: string } | null;
  return element?.value?.trim() ?? '';
}

function splitList(raw: string): string[] {
  return raw
    .split(',')
    .map((v) => v.trim())
    .filter((v) => v.length > 0);
}

export function readComposerForm(
  form: FormLike,
  activity: Activity,
  selectedCard: number | null,
  stripSize: number,
): ComposerSelection {
  const constraints: Partial<Record<ConstraintKey, string[]>> = {};
  for (const key of CONSTRAINT_KEYS) {
    const values = splitList(fieldValue(form, key));
    if (values.length) constraints[key] = values;
  }
  const selection: ComposerSelection = { activity, constraints };
  if (selectedCard !== null) {
    selection.targetPosition = selectedCard;
    selection.stripSize = stripSize;
  }
  const position = fieldValue(form, 'position');
  if (position === 'first' || position === 'last') {
    selection.position = position;
  }
  const seconds = fieldValue(form, 'durationSeconds');
  if (seconds) selection.durationSeconds = Number(seconds);
  const change = fieldValue(form, 'durationChange');
  if (change === 'shorter' || change === 'longer') {
    selection.durationChange = change;
  }
  const shareTo = fieldValue(form, 'shareTo');
  if (shareTo) selection.shareTo = shareTo;
  return selection;
}
