"""Dialog act ontology and frame structures.

A Frame is one turn's semantics: a two-level intent (act + activity), a slot
map, and clip references with roles and mention types.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ValidationError
from .memory_graph import CONSTRAINT_KEYS

ACT_REQUEST = "REQUEST"
ACT_INFORM = "INFORM"
ACTS = (ACT_REQUEST, ACT_INFORM)

CREATE_STORY = "CREATE_STORY"
ADD_CLIPS = "ADD_CLIPS"
REMOVE_CLIPS = "REMOVE_CLIPS"
REPLACE_CLIPS = "REPLACE_CLIPS"
REORDER_CLIPS = "REORDER_CLIPS"
REFINE_SEARCH = "REFINE_SEARCH"
MODIFY_DURATION = "MODIFY_DURATION"
SHARE_STORY = "SHARE_STORY"

ACTIVITIES = (
    CREATE_STORY, ADD_CLIPS, REMOVE_CLIPS, REPLACE_CLIPS, REORDER_CLIPS,
    REFINE_SEARCH, MODIFY_DURATION, SHARE_STORY,
)

ROLE_TARGET = "TARGET"
ROLE_ANCHOR = "ANCHOR"
ROLE_REFERENCE = "REFERENCE"
ROLES = (ROLE_TARGET, ROLE_ANCHOR, ROLE_REFERENCE)

MENTION_ADJECTIVAL = "ADJECTIVAL"
MENTION_ORDINAL = "ORDINAL"
MENTION_DEVICE = "DEVICE_CONTEXT"
MENTION_CARRYOVER = "CARRYOVER"
MENTION_UNSPECIFIED = "UNSPECIFIED"
MENTION_TYPES = (MENTION_ADJECTIVAL, MENTION_ORDINAL, MENTION_DEVICE,
                 MENTION_CARRYOVER)

POSITION_FIRST = "first"
POSITION_LAST = "last"
POSITION_BEFORE = "before"
POSITION_AFTER = "after"
POSITIONS = (POSITION_FIRST, POSITION_LAST, POSITION_BEFORE, POSITION_AFTER)

CONTROL_KEYS = ("position", "duration_s", "duration_change", "share_to")
ASSISTANT_KEYS = ("status", "count")
INT_SLOT_KEYS = ("duration_s", "count")
SLOT_KEYS = CONSTRAINT_KEYS + CONTROL_KEYS + ASSISTANT_KEYS


def normalize_slots(slots: dict) -> dict:
    """Canonical in-memory slot map.

    Constraint keys hold sorted tuples of strings (multi-valued); integer
    keys hold ints; everything else holds a plain string.
    """
    normalized = {}
    for key, value in slots.items():
        if key not in SLOT_KEYS:
            raise ValidationError(f"unknown slot key '{key}'")
        if key in CONSTRAINT_KEYS:
            if isinstance(value, (list, tuple, set, frozenset)):
                normalized[key] = tuple(sorted(str(v) for v in value))
            else:
                normalized[key] = (str(value),)
        elif key in INT_SLOT_KEYS:
            try:
                normalized[key] = int(value)
            except (TypeError, ValueError):
                raise ValidationError(
                    f"slot '{key}' expects an integer, got {value!r}"
                ) from None
        else:
            normalized[key] = str(value)
    return normalized


@dataclass(frozen=True)
class ClipRef:
    clip_ids: tuple[str, ...]  # gold resolution, kept in snapshot order
    role: str
    mention_type: str
    mention_text: str = ""

    def __post_init__(self):
        if not self.clip_ids:
            raise ValidationError("clip reference must carry at least one id")
        if self.role not in ROLES:
            raise ValidationError(f"unknown clip-ref role '{self.role}'")
        if (self.mention_type not in MENTION_TYPES
                and self.mention_type != MENTION_UNSPECIFIED):
            raise ValidationError(
                f"unknown mention type '{self.mention_type}'"
            )
        if self.mention_type == MENTION_ORDINAL and len(self.clip_ids) != 1:
            raise ValidationError("ordinal mentions resolve to exactly one id")

    def to_dict(self) -> dict:
        return {
            "clip_ids": list(self.clip_ids),
            "role": self.role,
            "mention_type": self.mention_type,
            "mention_text": self.mention_text,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ClipRef":
        return cls(
            clip_ids=tuple(data["clip_ids"]),
            role=data["role"],
            mention_type=data["mention_type"],
            mention_text=data.get("mention_text", ""),
        )


@dataclass(frozen=True)
class Frame:
    act: str
    activity: str
    slots: dict = field(default_factory=dict)
    refs: tuple[ClipRef, ...] = ()

    def __post_init__(self):
        if self.act not in ACTS:
            raise ValidationError(f"unknown act '{self.act}'")
        if self.activity not in ACTIVITIES:
            raise ValidationError(f"unknown activity '{self.activity}'")
        object.__setattr__(self, "slots", normalize_slots(self.slots))
        object.__setattr__(self, "refs", tuple(self.refs))

    def __eq__(self, other):
        if not isinstance(other, Frame):
            return NotImplemented
        return (self.act == other.act and self.activity == other.activity
                and self.slots == other.slots and self.refs == other.refs)

    def __hash__(self):
        return hash((self.act, self.activity,
                     tuple(sorted(self.slots.items())), self.refs))

    def constraint_slots(self) -> dict:
        return {k: v for k, v in self.slots.items() if k in CONSTRAINT_KEYS}

    def flat_clip_ids(self) -> tuple[str, ...]:
        """All referenced ids, role groups in TARGET/ANCHOR/REFERENCE order."""
        seen = []
        for role in ROLES:
            for ref in self.refs:
                if ref.role != role:
                    continue
                for clip_id in ref.clip_ids:
                    if clip_id not in seen:
                        seen.append(clip_id)
        return tuple(seen)

    def to_dict(self) -> dict:
        slots = {}
        for key, value in self.slots.items():
            slots[key] = list(value) if isinstance(value, tuple) else value
        return {
            "act": self.act,
            "activity": self.activity,
            "slots": slots,
            "refs": [ref.to_dict() for ref in self.refs],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Frame":
        return cls(
            act=data["act"],
            activity=data["activity"],
            slots=dict(data.get("slots", {})),
            refs=tuple(ClipRef.from_dict(r) for r in data.get("refs", [])),
        )
