"""Executable semantics of montage editing.

StoryState snapshots are immutable; ``execute`` is a pure function from
(state, api call, graph) to (new state, execution result), which is what
makes dialog replay an exact invariant.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .errors import ValidationError
from .frames import (
    ACT_INFORM, ACT_REQUEST, ADD_CLIPS, CREATE_STORY, MODIFY_DURATION,
    POSITIONS, POSITION_AFTER, POSITION_BEFORE, POSITION_FIRST, POSITION_LAST,
    REFINE_SEARCH, REMOVE_CLIPS, REORDER_CLIPS, REPLACE_CLIPS, ROLE_ANCHOR,
    ROLE_REFERENCE, ROLE_TARGET, SHARE_STORY, Frame,
)
from .memory_graph import MemoryGraph, search

STATUS_OK = "OK"
STATUS_NO_RESULTS = "NO_RESULTS"
STATUS_INVALID_REF = "INVALID_REF"

SEARCH_ACTIVITIES = (CREATE_STORY, ADD_CLIPS, REFINE_SEARCH)
DURATION_STEP = 0.25  # relative step for shorter/longer requests


@dataclass(frozen=True)
class StoryEntry:
    clip_id: str
    effective_duration_s: int

    def to_dict(self) -> dict:
        return {"clip_id": self.clip_id,
                "effective_duration_s": self.effective_duration_s}

    @classmethod
    def from_dict(cls, data: dict) -> "StoryEntry":
        return cls(data["clip_id"], int(data["effective_duration_s"]))


@dataclass(frozen=True)
class StoryState:
    entries: tuple[StoryEntry, ...] = ()
    viewer_index: int | None = None
    last_search: dict = field(default_factory=dict)
    shared: bool = False

    def __post_init__(self):
        ids = [entry.clip_id for entry in self.entries]
        if len(set(ids)) != len(ids):
            raise ValidationError("story entries contain duplicate clip ids")
        if self.viewer_index is not None and not (
                0 <= self.viewer_index < len(self.entries)):
            raise ValidationError("viewer_index out of range")
        for entry in self.entries:
            if entry.effective_duration_s < 1:
                raise ValidationError("effective duration must be >= 1 s")

    def clip_ids(self) -> tuple[str, ...]:
        return tuple(entry.clip_id for entry in self.entries)

    def index_of(self, clip_id: str) -> int | None:
        for index, entry in enumerate(self.entries):
            if entry.clip_id == clip_id:
                return index
        return None

    def viewer_clip_id(self) -> str | None:
        if self.viewer_index is None:
            return None
        return self.entries[self.viewer_index].clip_id

    def to_dict(self) -> dict:
        return {
            "entries": [entry.to_dict() for entry in self.entries],
            "viewer_index": self.viewer_index,
            "last_search": {k: list(v) for k, v in self.last_search.items()},
            "shared": self.shared,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "StoryState":
        return cls(
            entries=tuple(StoryEntry.from_dict(e) for e in data["entries"]),
            viewer_index=data.get("viewer_index"),
            last_search={k: tuple(v)
                         for k, v in data.get("last_search", {}).items()},
            shared=bool(data.get("shared", False)),
        )


@dataclass(frozen=True)
class ExecutionResult:
    status: str
    added: tuple[str, ...] = ()
    removed: tuple[str, ...] = ()
    message_slots: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "added": list(self.added),
            "removed": list(self.removed),
            "message_slots": dict(self.message_slots),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExecutionResult":
        return cls(
            status=data["status"],
            added=tuple(data.get("added", ())),
            removed=tuple(data.get("removed", ())),
            message_slots=dict(data.get("message_slots", {})),
        )


@dataclass(frozen=True)
class EngineConfig:
    max_story_len: int = 8


def _refs_by_role(call: Frame, role: str):
    return [ref for ref in call.refs if ref.role == role]


def _role_ids(call: Frame, role: str) -> list[str]:
    ids = []
    for ref in _refs_by_role(call, role):
        for clip_id in ref.clip_ids:
            if clip_id not in ids:
                ids.append(clip_id)
    return ids


def validate_api_call(call: Frame) -> Frame:
    """Check the per-activity argument schema of a user API call."""
    if call.act != ACT_REQUEST:
        raise ValidationError("API calls carry the REQUEST act")
    constraints = call.constraint_slots()
    targets = _role_ids(call, ROLE_TARGET)
    anchors = _role_ids(call, ROLE_ANCHOR)
    references = _role_ids(call, ROLE_REFERENCE)
    position = call.slots.get("position")
    if position is not None and position not in POSITIONS:
        raise ValidationError(f"unknown position '{position}'")
    activity = call.activity
    if activity == CREATE_STORY:
        if not constraints or call.refs:
            raise ValidationError("CREATE_STORY takes constraints and no refs")
    elif activity == ADD_CLIPS:
        if not constraints:
            raise ValidationError("ADD_CLIPS requires search constraints")
        if position in (POSITION_BEFORE, POSITION_AFTER) and not anchors:
            raise ValidationError("relative position requires an ANCHOR ref")
    elif activity == REMOVE_CLIPS:
        if not targets:
            raise ValidationError("REMOVE_CLIPS requires a TARGET ref")
    elif activity == REPLACE_CLIPS:
        if not targets:
            raise ValidationError("REPLACE_CLIPS requires a TARGET ref")
        if not constraints and not references:
            raise ValidationError(
                "REPLACE_CLIPS requires constraints or a REFERENCE ref")
    elif activity == REORDER_CLIPS:
        if len(targets) != 1:
            raise ValidationError("REORDER_CLIPS takes exactly one TARGET")
        if position is None:
            raise ValidationError("REORDER_CLIPS requires a position")
        needs_anchor = position in (POSITION_BEFORE, POSITION_AFTER)
        if needs_anchor != bool(anchors):
            raise ValidationError(
                "REORDER_CLIPS takes an ANCHOR iff position is before/after")
    elif activity == REFINE_SEARCH:
        if not constraints:
            raise ValidationError("REFINE_SEARCH requires >=1 constraint")
    elif activity == MODIFY_DURATION:
        if not targets:
            raise ValidationError("MODIFY_DURATION requires a TARGET ref")
        has_abs = "duration_s" in call.slots
        has_rel = "duration_change" in call.slots
        if has_abs == has_rel:
            raise ValidationError(
                "MODIFY_DURATION takes exactly one of duration_s or "
                "duration_change")
        if has_rel and call.slots["duration_change"] not in ("shorter", "longer"):
            raise ValidationError("duration_change must be shorter or longer")
        if has_abs and call.slots["duration_s"] < 1:
            raise ValidationError("duration_s must be >= 1")
    elif activity == SHARE_STORY:
        if "share_to" not in call.slots:
            raise ValidationError("SHARE_STORY requires a share_to slot")
    return call


def applicable_activities(state: StoryState) -> set[str]:
    """Activities that make sense at the given story state."""
    applicable = set()
    if not state.entries:
        applicable.add(CREATE_STORY)
    else:
        applicable.update({ADD_CLIPS, REMOVE_CLIPS, REPLACE_CLIPS,
                           MODIFY_DURATION, SHARE_STORY})
        if len(state.entries) >= 2:
            applicable.add(REORDER_CLIPS)
    if state.last_search:
        applicable.add(REFINE_SEARCH)
    return applicable


def _entries_for(clips) -> tuple[StoryEntry, ...]:
    return tuple(StoryEntry(clip.id, clip.duration_s) for clip in clips)


def _insert_position(entries, position, anchor_id) -> int:
    if position == POSITION_FIRST:
        return 0
    if position in (None, POSITION_LAST):
        return len(entries)
    anchor_index = next(
        (i for i, e in enumerate(entries) if e.clip_id == anchor_id), None)
    if anchor_index is None:
        raise ValidationError(f"anchor '{anchor_id}' not in story")
    return anchor_index if position == POSITION_BEFORE else anchor_index + 1


def _viewer_for(entries, preferred_clip_id=None, fallback_index=None):
    if not entries:
        return None
    if preferred_clip_id is not None:
        for index, entry in enumerate(entries):
            if entry.clip_id == preferred_clip_id:
                return index
    if fallback_index is not None:
        return max(0, min(fallback_index, len(entries) - 1))
    return 0


def execute(state: StoryState, call: Frame, graph: MemoryGraph,
            config: EngineConfig | None = None):
    """Apply one API call; returns ``(new_state, ExecutionResult)``."""
    config = config or EngineConfig()
    validate_api_call(call)
    activity = call.activity
    constraints = call.constraint_slots()
    targets = _role_ids(call, ROLE_TARGET)
    anchors = _role_ids(call, ROLE_ANCHOR)
    references = _role_ids(call, ROLE_REFERENCE)
    story_ids = set(state.clip_ids())

    missing = [cid for cid in targets + anchors if cid not in story_ids]
    if missing:
        return state, ExecutionResult(
            STATUS_INVALID_REF, message_slots={"missing": ",".join(missing)})

    if activity == CREATE_STORY:
        results = search(graph, constraints)[:config.max_story_len]
        if not results:
            return (replace(state, last_search=constraints),
                    ExecutionResult(STATUS_NO_RESULTS))
        entries = _entries_for(results)
        new_state = StoryState(entries=entries, viewer_index=0,
                               last_search=constraints, shared=state.shared)
        added = tuple(clip.id for clip in results)
        return new_state, ExecutionResult(
            STATUS_OK, added=added, message_slots={"count": len(added)})

    if activity == ADD_CLIPS:
        room = config.max_story_len - len(state.entries)
        results = search(graph, constraints, exclude=story_ids)[:max(room, 0)]
        if not results:
            return (replace(state, last_search=constraints),
                    ExecutionResult(STATUS_NO_RESULTS))
        index = _insert_position(state.entries, call.slots.get("position"),
                                 anchors[0] if anchors else None)
        entries = (state.entries[:index] + _entries_for(results)
                   + state.entries[index:])
        new_state = StoryState(
            entries=entries,
            viewer_index=_viewer_for(entries, results[0].id),
            last_search=constraints, shared=state.shared)
        added = tuple(clip.id for clip in results)
        return new_state, ExecutionResult(
            STATUS_OK, added=added, message_slots={"count": len(added)})

    if activity == REMOVE_CLIPS:
        removed = tuple(cid for cid in state.clip_ids() if cid in set(targets))
        entries = tuple(e for e in state.entries if e.clip_id not in set(targets))
        new_state = StoryState(
            entries=entries,
            viewer_index=_viewer_for(entries, state.viewer_clip_id(),
                                     state.viewer_index),
            last_search=state.last_search, shared=state.shared)
        return new_state, ExecutionResult(
            STATUS_OK, removed=removed, message_slots={"count": len(removed)})

    if activity == REPLACE_CLIPS:
        if references:
            ref_clip = graph.clip(references[0])
            query = {"activity": (ref_clip.activity,)}
            if ref_clip.attributes:
                query["attribute"] = tuple(sorted(ref_clip.attributes))
        else:
            query = constraints
        results = search(graph, query, exclude=story_ids)[:len(targets)]
        if not results:
            return state, ExecutionResult(STATUS_NO_RESULTS)
        first_index = min(i for i, e in enumerate(state.entries)
                          if e.clip_id in set(targets))
        kept = [e for e in state.entries if e.clip_id not in set(targets)]
        insert_at = min(first_index, len(kept))
        entries = tuple(kept[:insert_at]) + _entries_for(results) \
            + tuple(kept[insert_at:])
        removed = tuple(cid for cid in state.clip_ids() if cid in set(targets))
        added = tuple(clip.id for clip in results)
        new_state = StoryState(
            entries=entries, viewer_index=_viewer_for(entries, added[0]),
            last_search=state.last_search, shared=state.shared)
        return new_state, ExecutionResult(
            STATUS_OK, added=added, removed=removed,
            message_slots={"count": len(added) + len(removed)})

    if activity == REORDER_CLIPS:
        target_id = targets[0]
        moving = next(e for e in state.entries if e.clip_id == target_id)
        rest = [e for e in state.entries if e.clip_id != target_id]
        index = _insert_position(rest, call.slots["position"],
                                 anchors[0] if anchors else None)
        entries = tuple(rest[:index]) + (moving,) + tuple(rest[index:])
        new_state = StoryState(
            entries=entries, viewer_index=_viewer_for(entries, target_id),
            last_search=state.last_search, shared=state.shared)
        return new_state, ExecutionResult(STATUS_OK)

    if activity == REFINE_SEARCH:
        merged = dict(state.last_search)
        merged.update(constraints)
        results = search(graph, merged)[:config.max_story_len]
        if not results:
            return (replace(state, last_search=merged),
                    ExecutionResult(STATUS_NO_RESULTS))
        old_ids = set(state.clip_ids())
        entries = _entries_for(results)
        new_ids = {e.clip_id for e in entries}
        new_state = StoryState(entries=entries, viewer_index=0,
                               last_search=merged, shared=state.shared)
        return new_state, ExecutionResult(
            STATUS_OK,
            added=tuple(e.clip_id for e in entries if e.clip_id not in old_ids),
            removed=tuple(cid for cid in state.clip_ids()
                          if cid not in new_ids),
            message_slots={"count": len(entries)})

    if activity == MODIFY_DURATION:
        target_set = set(targets)
        entries = []
        for entry in state.entries:
            if entry.clip_id not in target_set:
                entries.append(entry)
                continue
            if "duration_s" in call.slots:
                duration = call.slots["duration_s"]
            elif call.slots["duration_change"] == "shorter":
                duration = round(entry.effective_duration_s * (1 - DURATION_STEP))
            else:
                duration = round(entry.effective_duration_s * (1 + DURATION_STEP))
            entries.append(StoryEntry(entry.clip_id, max(1, duration)))
        new_state = replace(state, entries=tuple(entries))
        return new_state, ExecutionResult(
            STATUS_OK, message_slots={"count": len(target_set)})

    if activity == SHARE_STORY:
        new_state = replace(state, shared=True)
        return new_state, ExecutionResult(
            STATUS_OK, message_slots={"share_to": call.slots["share_to"]})

    raise ValidationError(f"unsupported activity '{activity}'")


def assistant_frame(result: ExecutionResult, call: Frame) -> Frame:
    """Mirror the user activity as an INFORM frame describing the outcome."""
    slots = {"status": result.status.lower()}
    if result.status == STATUS_OK and (result.added or result.removed):
        slots["count"] = len(result.added) + len(result.removed)
    return Frame(act=ACT_INFORM, activity=call.activity, slots=slots)


def replay(calls, graph: MemoryGraph, config: EngineConfig | None = None):
    """Run an API-call log from the empty story; yields each (state, result).

    The state yielded with call ``i`` is the post-execution state, which must
    equal the assistant-turn snapshot recorded at that point in a dialog.
    """
    state = StoryState()
    outputs = []
    for call in calls:
        state, result = execute(state, call, graph, config)
        outputs.append((state, result))
    return outputs
