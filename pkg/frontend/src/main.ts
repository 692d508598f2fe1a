// Browser entry point: wires StudioApp to the DOM. Everything here is
// presentation only; all behavior lives in app.ts / composer.ts and is
// covered by the vitest suite.

import { ApiClient } from './api.js';
import { StudioApp } from './app.js';
import {
  ACTIVITY_FIELDS,
  readComposerForm,
  type ComposerField,
} from './composerForm.js';
import { composeStructuredRequest } from './composer.js';
import { buildStoryView } from './story.js';
import { ACTIVITIES, type Activity } from './types.js';

const API_BASE = (window as { MONTAGE_API_BASE?: string }).MONTAGE_API_BASE ?? '';

const app = new StudioApp(new ApiClient(API_BASE));

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const chatLog = el<HTMLDivElement>('chat-log');
const strip = el<HTMLDivElement>('story-strip');
const inspector = el<HTMLDivElement>('inspector');
const toast = el<HTMLDivElement>('toast');
const input = el<HTMLInputElement>('chat-input');
const sendButton = el<HTMLButtonElement>('send-button');
const composerForm = el<HTMLFormElement>('composer');
const composerActivity = el<HTMLSelectElement>('composer-activity');
const composerFields = el<HTMLDivElement>('composer-fields');
const composerHints = el<HTMLDivElement>('composer-hints');

let selectedCard: number | null = null;

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

function render(): void {
  const state = app.getState();

  chatLog.innerHTML = state.chat
    .map((bubble) => {
      const cls = bubble.speaker === 'USER' ? 'bubble user' : 'bubble assistant';
      const extra = bubble.clarification ? ' clarification' : '';
      return `<div class="${cls}${extra}">${escapeHtml(bubble.text)}</div>`;
    })
    .join('');
  chatLog.scrollTop = chatLog.scrollHeight;

  const view = buildStoryView(state.snapshot, app.clipCache());
  if (selectedCard !== null && selectedCard > view.cards.length) {
    selectedCard = null;
  }
  strip.innerHTML =
    view.cards
      .map((card, index) => {
        const classes = ['card'];
        if (card.isViewer) classes.push('viewer');
        if (selectedCard === index + 1) classes.push('selected');
        const chips = [card.activity, card.time, card.location, ...card.attributes]
          .map((chip) => `<span class="chip">${escapeHtml(chip)}</span>`)
          .join('');
        return (
          `<div class="${classes.join(' ')}" data-pos="${index + 1}">` +
          `<div class="card-id">${escapeHtml(card.clip_id)}</div>${chips}` +
          `<div class="card-dur">${card.effective_duration_s}s</div></div>`
        );
      })
      .join('') +
    (view.shared ? '<div class="shared-badge">shared</div>' : '');

  inspector.innerHTML = state.inspector
    .map((entry) => {
      const frame = entry.linearFrame
        ? `<code>${escapeHtml(entry.linearFrame)}</code>`
        : '<em>unparseable</em>';
      const ids = entry.resolvedClipIds.length
        ? ` clips: ${entry.resolvedClipIds.join(', ')}`
        : '';
      return (
        `<div class="turn"><div class="utt">${escapeHtml(entry.utterance)}</div>` +
        `${frame}<div class="meta">${entry.status}${ids}</div></div>`
      );
    })
    .join('');

  toast.textContent = state.toast ?? '';
  toast.style.display = state.toast ? 'block' : 'none';
  sendButton.disabled = state.pending;
  if (state.toast && !input.value) input.value = state.draft;
}

function renderComposerFields(): void {
  const fields = ACTIVITY_FIELDS[composerActivity.value as Activity] ?? [];
  composerFields.innerHTML = fields
    .map((field: ComposerField) => {
      if (field.kind === 'select') {
        const options = field.options
          .map((o) => `<option value="${o}">${o}</option>`)
          .join('');
        return `<label>${field.label} <select name="${field.name}"><option value=""></option>${options}</select></label>`;
      }
      return `<label>${field.label} <input name="${field.name}" placeholder="${field.placeholder ?? ''}"></label>`;
    })
    .join('');
}

strip.addEventListener('click', (event) => {
  const card = (event.target as HTMLElement).closest('.card');
  if (!card) return;
  const pos = Number(card.getAttribute('data-pos'));
  selectedCard = selectedCard === pos ? null : pos;
  render();
});

sendButton.addEventListener('click', () => {
  void app.send(input.value).then((sent) => {
    if (sent) input.value = '';
  });
});

input.addEventListener('keydown', (event) => {
  if (event.key === 'Enter') sendButton.click();
});

composerActivity.addEventListener('change', renderComposerFields);

composerForm.addEventListener('submit', (event) => {
  event.preventDefault();
  const selection = readComposerForm(
    composerForm,
    composerActivity.value as Activity,
    selectedCard,
    app.getState().snapshot.entries.length,
  );
  const result = composeStructuredRequest(selection);
  if (!result.ok) {
    composerHints.innerHTML = Object.entries(result.hints)
      .map(([field, hint]) => `<div class="hint">${field}: ${escapeHtml(hint)}</div>`)
      .join('');
    return;
  }
  composerHints.innerHTML = '';
  void app.send(result.text);
});

app.subscribe(render);

const params = new URLSearchParams(window.location.search);
const existing = params.get('session') ?? window.sessionStorage.getItem('montage-session');
const boot = existing
  ? app.restore(existing).catch(() => app.start())
  : app.start();
void boot.then(() => {
  const id = app.getState().sessionId;
  if (id) window.sessionStorage.setItem('montage-session', id);
  for (const activity of ACTIVITIES) {
    const option = document.createElement('option');
    option.value = activity;
    option.textContent = activity;
    composerActivity.appendChild(option);
  }
  renderComposerFields();
  render();
});
