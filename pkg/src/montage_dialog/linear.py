"""Linearized frame codec, prompt construction, and cumulative dialog state.

The canonical wire form is ``ACT:ACTIVITY [ k = v, ... ] < clip: ids >`` with
slot keys sorted lexicographically, multi-valued slots as repeated pairs, and
empty sections rendered ``[ ]`` / ``< >``. parse accepts tolerant whitespace
and returns one canonical rendering (serialize . parse . serialize ==
serialize).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import FrameParseError, UnknownTokenError, ValidationError
from .frames import (
    ACTS, ACTIVITIES, ACT_REQUEST, ADD_CLIPS, CREATE_STORY, INT_SLOT_KEYS,
    MENTION_UNSPECIFIED, REFINE_SEARCH, ROLE_TARGET, ClipRef, Frame,
)
from .memory_graph import CONSTRAINT_KEYS, MemoryGraph
from .story import StoryState

_TOKEN_RE = re.compile(r"[A-Za-z0-9_.-]+")


@dataclass(frozen=True)
class PromptConfig:
    history_turns: int = 4
    include_context: bool = True
    mode: str = "tokens"

    def __post_init__(self):
        if self.history_turns < 1:
            raise ValidationError("history_turns must be >= 1")
        if self.mode != "tokens":
            raise ValidationError(
                f"prompt mode '{self.mode}' is not implemented; only "
                "'tokens' prompts are built here")


def serialize_frame(frame: Frame) -> str:
    pairs = []
    for key in sorted(frame.slots):
        value = frame.slots[key]
        if isinstance(value, tuple):
            pairs.extend(f"{key} = {v}" for v in value)
        else:
            pairs.append(f"{key} = {value}")
    slot_section = f"[ {', '.join(pairs)} ]" if pairs else "[ ]"
    ids = frame.flat_clip_ids()
    clip_section = f"< clip: {', '.join(ids)} >" if ids else "< >"
    return f"{frame.act}:{frame.activity} {slot_section} {clip_section}"


def _fail(text: str, offset: int, message: str, expected: str | None = None):
    raise FrameParseError(message, min(offset, len(text)), expected)


def parse_frame(text: str) -> Frame:
    """Parse a linear frame; roles beyond TARGET are not recoverable from the
    flat id list, so all parsed refs carry role TARGET and mention type
    UNSPECIFIED."""
    cursor = 0

    def skip_ws(pos):
        while pos < len(text) and text[pos].isspace():
            pos += 1
        return pos

    cursor = skip_ws(cursor)
    match = _TOKEN_RE.match(text, cursor)
    if not match:
        _fail(text, cursor, "missing act token", "ACT")
    act = match.group(0)
    if act not in ACTS:
        raise UnknownTokenError(f"unknown act '{act}' at offset {cursor}")
    cursor = match.end()
    if cursor >= len(text) or text[cursor] != ":":
        _fail(text, cursor, "missing ':' after act", "':'")
    cursor += 1
    match = _TOKEN_RE.match(text, cursor)
    if not match:
        _fail(text, cursor, "missing activity token", "ACTIVITY")
    activity = match.group(0)
    if activity not in ACTIVITIES:
        raise UnknownTokenError(
            f"unknown activity '{activity}' at offset {cursor}")
    cursor = match.end()

    cursor = skip_ws(cursor)
    if cursor >= len(text) or text[cursor] != "[":
        _fail(text, cursor, "missing slot section", "'['")
    closing = text.find("]", cursor)
    if closing < 0:
        _fail(text, len(text), "unterminated slot section", "']'")
    slot_body = text[cursor + 1:closing]
    slots: dict = {}
    if slot_body.strip():
        offset = cursor + 1
        for chunk in slot_body.split(","):
            if "=" not in chunk:
                _fail(text, offset, f"malformed slot '{chunk.strip()}'",
                      "'key = value'")
            key, _, raw = chunk.partition("=")
            key = key.strip()
            value = raw.strip()
            if not key or not value:
                _fail(text, offset, "empty slot key or value",
                      "'key = value'")
            if key in INT_SLOT_KEYS:
                try:
                    parsed_value: object = int(value)
                except ValueError:
                    _fail(text, offset, f"slot '{key}' expects an integer",
                          "digits")
            else:
                parsed_value = value
            if key in CONSTRAINT_KEYS:
                existing = list(slots.get(key, ()))
                existing.append(parsed_value)
                slots[key] = tuple(sorted(existing))
            elif key in slots:
                _fail(text, offset, f"duplicate slot key '{key}'")
            else:
                slots[key] = parsed_value
            offset += len(chunk) + 1
    cursor = closing + 1

    cursor = skip_ws(cursor)
    if cursor >= len(text) or text[cursor] != "<":
        _fail(text, cursor, "missing clip section", "'<'")
    closing = text.find(">", cursor)
    if closing < 0:
        _fail(text, len(text), "unterminated clip section", "'>'")
    clip_body = text[cursor + 1:closing].strip()
    refs: tuple[ClipRef, ...] = ()
    if clip_body:
        if not clip_body.startswith("clip:"):
            _fail(text, cursor + 1, "clip section must start with 'clip:'",
                  "'clip:'")
        ids = []
        for raw_id in clip_body[len("clip:"):].split(","):
            clip_id = raw_id.strip()
            if not clip_id:
                _fail(text, cursor + 1, "empty clip id")
            if clip_id not in ids:
                ids.append(clip_id)
        refs = (ClipRef(clip_ids=tuple(ids), role=ROLE_TARGET,
                        mention_type=MENTION_UNSPECIFIED),)
    trailing = text[closing + 1:].strip()
    if trailing:
        _fail(text, closing + 1, f"unexpected trailing text '{trailing}'")
    try:
        return Frame(act=act, activity=activity, slots=slots, refs=refs)
    except ValidationError as exc:
        raise FrameParseError(str(exc), 0) from exc


def flatten_frame(frame: Frame):
    """Role-insensitive view used by round-trip checks and joint scoring."""
    return (frame.act, frame.activity, tuple(sorted(frame.slots.items())),
            frame.flat_clip_ids())


def _clip_context(clip) -> str:
    pairs = [f"activity = {clip.activity}", f"time = {clip.time}",
             f"location = {clip.location}"]
    pairs.extend(f"attributes = {attr}" for attr in clip.attributes)
    return f"clip {clip.id} : " + " , ".join(pairs)


def build_prompt(history_turns, snapshot: StoryState, graph: MemoryGraph,
                 config: PromptConfig | None = None) -> str:
    """Stringified-token prompt: multimodal context plus recent history.

    ``history_turns`` are dialog turn dicts; the last one must be the user
    turn being labeled.
    """
    config = config or PromptConfig()
    if not history_turns:
        raise ValidationError("history must contain at least one turn")
    if history_turns[-1].get("speaker") != "USER":
        raise ValidationError("last history turn must be the user turn")
    parts = []
    if config.include_context:
        clip_parts = []
        for entry in snapshot.entries:
            if not graph.has_clip(entry.clip_id):
                raise ValidationError(
                    f"snapshot references unknown clip '{entry.clip_id}'")
            clip_parts.append(_clip_context(graph.clip(entry.clip_id)))
        viewer = snapshot.viewer_clip_id() or "none"
        body = " ; ".join(clip_parts) + " ; " if clip_parts else "; "
        parts.append(f"<context> {body}viewer = {viewer}")
    window = history_turns[-config.history_turns:]
    rendered = " ".join(
        ("U: " if turn["speaker"] == "USER" else "A: ")
        + turn["template_utterance"]
        for turn in window)
    parts.append(f"<history> {rendered}")
    return " ".join(parts)


def cumulative_state(turns) -> Frame:
    """Fold user frames into the cumulative Task-3 state.

    CREATE/ADD/REFINE merge constraint slots with override-on-conflict;
    other activities leave the constraint map untouched. The returned Frame
    carries the final user turn's intent and refs over the folded slots.
    """
    merged: dict = {}
    final = None
    for turn in turns:
        frame = turn["frame"] if isinstance(turn, dict) else turn
        if isinstance(frame, dict):
            frame = Frame.from_dict(frame)
        if frame.act != ACT_REQUEST:
            continue
        if frame.activity in (CREATE_STORY, ADD_CLIPS, REFINE_SEARCH):
            merged.update(frame.constraint_slots())
        final = frame
    if final is None:
        raise ValidationError("no user turns to fold")
    return Frame(act=final.act, activity=final.activity, slots=merged,
                 refs=final.refs)
