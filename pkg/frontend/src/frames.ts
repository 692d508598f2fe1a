// Linearized-frame rendering. serializeFrame must stay byte-identical to
// the server's canonical form `ACT:ACTIVITY [ k = v, ... ] < clip: ids >`:
// slot keys sorted lexicographically, multi-valued slots as repeated pairs,
// empty sections rendered `[ ]` / `< >`, and referenced ids flattened in
// TARGET, ANCHOR, REFERENCE order with duplicates dropped.

import type { Frame, Role } from './types.js';

const ROLE_ORDER: Role[] = ['TARGET', 'ANCHOR', 'REFERENCE'];

export function flatClipIds(frame: Frame): string[] {
  const seen: string[] = [];
  for (const role of ROLE_ORDER) {
    for (const ref of frame.refs) {
      if (ref.role !== role) continue;
      for (const id of ref.clip_ids) {
        if (!seen.includes(id)) seen.push(id);
      }
    }
  }
  return seen;
}

export function serializeFrame(frame: Frame): string {
  const pairs: string[] = [];
  for (const key of Object.keys(frame.slots).sort()) {
    const value = frame.slots[key];
    if (Array.isArray(value)) {
      for (const v of value) pairs.push(`${key} = ${v}`);
    } else {
      pairs.push(`${key} = ${value}`);
    }
  }
  const slotSection = pairs.length ? `[ ${pairs.join(', ')} ]` : '[ ]';
  const ids = flatClipIds(frame);
  const clipSection = ids.length ? `< clip: ${ids.join(', ')} >` : '< >';
  return `${frame.act}:${frame.activity} ${slotSection} ${clipSection}`;
}

/** Human-readable slot listing for the inspector panel. */
export function describeSlots(frame: Frame): string {
  const parts: string[] = [];
  for (const key of Object.keys(frame.slots).sort()) {
    const value = frame.slots[key];
    parts.push(`${key}=${Array.isArray(value) ? value.join('|') : value}`);
  }
  return parts.join(', ');
}
