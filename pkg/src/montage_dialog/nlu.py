"""Rule-based NLU: trigger-phrase intent detection, gazetteer slot filling,
and heuristic multimodal coreference resolution.

This is the deterministic inverse of the template grammar and also the
understanding engine behind the interactive session service.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .frames import (
    ADD_CLIPS, CREATE_STORY, MENTION_ADJECTIVAL, MENTION_CARRYOVER,
    MENTION_DEVICE, MENTION_ORDINAL, MODIFY_DURATION, POSITION_AFTER,
    POSITION_BEFORE, POSITION_FIRST, POSITION_LAST, REFINE_SEARCH,
    REMOVE_CLIPS, REORDER_CLIPS, REPLACE_CLIPS, ROLE_ANCHOR, ROLE_REFERENCE,
    ROLE_TARGET, SHARE_STORY,
)
from .memory_graph import MemoryGraph
from .story import StoryState
from .templates import ORDINAL_INDEX, SHARE_TARGETS
from .vocabulary import Vocabulary

# Tie-break order when two equally long trigger phrases match.
ACTIVITY_PRIORITY = (
    CREATE_STORY, REPLACE_CLIPS, REMOVE_CLIPS, ADD_CLIPS, REORDER_CLIPS,
    REFINE_SEARCH, MODIFY_DURATION, SHARE_STORY,
)

DEFAULT_TRIGGERS = {
    CREATE_STORY: ("create a story", "make me a story", "put together a story"),
    ADD_CLIPS: ("add",),
    REMOVE_CLIPS: ("remove", "take out", "delete"),
    REPLACE_CLIPS: ("replace", "swap"),
    REORDER_CLIPS: ("move",),
    REFINE_SEARCH: ("only keep", "narrow it down", "instead"),
    MODIFY_DURATION: ("shorter", "longer", "seconds"),
    SHARE_STORY: ("share", "send this story", "post this story"),
}

_ORDINAL_ALTERNATION = (
    "second to the last|second to last|first|second|third|fourth|fifth|"
    "sixth|seventh|eighth|last"
)
_MENTION_NOUN = r"(?:clip|one|video)"
_DEVICE_RE = re.compile(
    rf"\bthe {_MENTION_NOUN} i(?:'m| am) (?:currently )?viewing\b")
_CARRYOVER_RE = re.compile(
    rf"\bthe {_MENTION_NOUN} i (?:added|mentioned) earlier\b")
_ORDINAL_RE = re.compile(
    rf"\bthe ({_ORDINAL_ALTERNATION}) {_MENTION_NOUN}\b")
_ADJECTIVAL_RE = re.compile(rf"\bthe ([a-z][a-z-]*) {_MENTION_NOUN}(s?)\b")
_WORD_RE = re.compile(r"[a-z0-9][a-z0-9-]*")
_DURATION_RE = re.compile(r"\b(\d+) seconds?\b")


@dataclass(frozen=True)
class MentionSpan:
    start: int
    end: int
    text: str
    mention_type: str
    # ordinal index, adjectival descriptor word, or None
    descriptor: object = None
    role: str = ROLE_TARGET


@dataclass
class PartialFrame:
    activity: str | None
    slots: dict = field(default_factory=dict)
    mentions: list[MentionSpan] = field(default_factory=list)
    raw_text: str = ""

    @property
    def unparseable(self) -> bool:
        return self.activity is None


@dataclass(frozen=True)
class Lexicon:
    vocabulary: Vocabulary
    triggers: dict = field(default_factory=lambda: dict(DEFAULT_TRIGGERS))

    def __post_init__(self):
        # value word -> constraint key; disjoint by vocabulary construction
        gazetteer = {}
        for key in ("activity", "time", "location", "object", "participant",
                    "attribute"):
            for value in self.vocabulary.values_for(key):
                gazetteer.setdefault(value, key)
        object.__setattr__(self, "gazetteer", gazetteer)
        descriptors = set(self.vocabulary.attributes) | set(
            self.vocabulary.activities)
        object.__setattr__(self, "descriptors", descriptors)
        seen = {}
        for activity, phrases in self.triggers.items():
            for phrase in phrases:
                if phrase in seen:
                    raise ValueError(
                        f"trigger '{phrase}' assigned to both {seen[phrase]} "
                        f"and {activity}")
                seen[phrase] = activity

    def to_dict(self) -> dict:
        return {
            "triggers": {k: list(v) for k, v in self.triggers.items()},
            "ordinals": dict(ORDINAL_INDEX),
            "share_targets": list(SHARE_TARGETS),
            "vocabulary": self.vocabulary.to_dict(),
        }

    def save(self, path):
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(self.to_dict(), handle, indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "Lexicon":
        return cls(
            vocabulary=Vocabulary.from_dict(data["vocabulary"]),
            triggers={k: tuple(v) for k, v in data["triggers"].items()},
        )


def build_lexicon(vocabulary: Vocabulary) -> Lexicon:
    return Lexicon(vocabulary=vocabulary)


def _find_trigger(lower: str, lexicon: Lexicon) -> str | None:
    best = None  # (phrase_len, -priority, activity)
    for activity, phrases in lexicon.triggers.items():
        priority = ACTIVITY_PRIORITY.index(activity)
        for phrase in phrases:
            if re.search(rf"\b{re.escape(phrase)}\b", lower):
                key = (len(phrase), -priority)
                if best is None or key > best[0]:
                    best = (key, activity)
    return best[1] if best else None


def extract_mentions(lower: str, lexicon: Lexicon) -> list[MentionSpan]:
    """Non-overlapping mention spans, earlier/longer/more-specific first."""
    candidates = []
    for match in _DEVICE_RE.finditer(lower):
        candidates.append((match.start(), -match.end(), 0, MentionSpan(
            match.start(), match.end(), match.group(0), MENTION_DEVICE)))
    for match in _CARRYOVER_RE.finditer(lower):
        candidates.append((match.start(), -match.end(), 1, MentionSpan(
            match.start(), match.end(), match.group(0), MENTION_CARRYOVER)))
    for match in _ORDINAL_RE.finditer(lower):
        index = ORDINAL_INDEX[match.group(1)]
        candidates.append((match.start(), -match.end(), 2, MentionSpan(
            match.start(), match.end(), match.group(0), MENTION_ORDINAL,
            descriptor=index)))
    for match in _ADJECTIVAL_RE.finditer(lower):
        descriptor = match.group(1)
        if descriptor not in lexicon.descriptors:
            continue
        candidates.append((match.start(), -match.end(), 3, MentionSpan(
            match.start(), match.end(), match.group(0), MENTION_ADJECTIVAL,
            descriptor=descriptor)))
    spans: list[MentionSpan] = []
    for _, _, _, span in sorted(candidates, key=lambda item: item[:3]):
        if all(span.end <= other.start or span.start >= other.end
               for other in spans):
            spans.append(span)
    return sorted(spans, key=lambda span: span.start)


def _assign_roles(lower: str, spans: list[MentionSpan]) -> list[MentionSpan]:
    assigned = []
    for span in spans:
        context = lower[max(0, span.start - 24):span.start]
        if re.search(r"similar to\s+$", context):
            role = ROLE_REFERENCE
        elif re.search(r"\b(before|after)\s+$", context):
            role = ROLE_ANCHOR
        else:
            role = ROLE_TARGET
        assigned.append(MentionSpan(span.start, span.end, span.text,
                                    span.mention_type, span.descriptor, role))
    return assigned


def _position_slot(lower: str, spans: list[MentionSpan]) -> str | None:
    if re.search(r"\b(to the front|at the beginning)\b", lower):
        return POSITION_FIRST
    if re.search(r"\b(to the end|at the end)\b", lower):
        return POSITION_LAST
    for span in spans:
        if span.role != ROLE_ANCHOR:
            continue
        context = lower[max(0, span.start - 24):span.start]
        if re.search(r"\bbefore\s+$", context):
            return POSITION_BEFORE
        if re.search(r"\bafter\s+$", context):
            return POSITION_AFTER
    return None


def parse_utterance(text: str, lexicon: Lexicon) -> PartialFrame:
    """Parse an utterance into an intent, slot map, and mention spans.

    Returns an UNPARSEABLE PartialFrame (activity None) when no trigger
    phrase matches; never raises on user input.
    """
    lower = text.lower()
    activity = _find_trigger(lower, lexicon)
    if activity is None:
        return PartialFrame(activity=None, raw_text=text)
    spans = _assign_roles(lower, extract_mentions(lower, lexicon))

    masked = list(lower)
    for span in spans:
        for position in range(span.start, span.end):
            masked[position] = " "
    masked_text = "".join(masked)

    slots: dict = {}
    if activity not in (MODIFY_DURATION, SHARE_STORY, REMOVE_CLIPS,
                        REORDER_CLIPS):
        found: dict[str, list[str]] = {}
        for match in _WORD_RE.finditer(masked_text):
            word = match.group(0)
            key = lexicon.gazetteer.get(word)
            if key is not None and word not in found.setdefault(key, []):
                found[key].append(word)
        slots.update({key: tuple(sorted(values))
                      for key, values in found.items()})

    if activity in (ADD_CLIPS, REORDER_CLIPS):
        position = _position_slot(lower, spans)
        if position is not None:
            slots["position"] = position
    if activity == MODIFY_DURATION:
        match = _DURATION_RE.search(lower)
        if match:
            slots["duration_s"] = int(match.group(1))
        elif re.search(r"\bshorter\b", lower):
            slots["duration_change"] = "shorter"
        elif re.search(r"\blonger\b", lower):
            slots["duration_change"] = "longer"
    if activity == SHARE_STORY:
        for target in SHARE_TARGETS:
            if re.search(rf"\b{target}\b", lower):
                slots["share_to"] = target
                break
    return PartialFrame(activity=activity, slots=slots, mentions=spans,
                        raw_text=text)


def resolve_mentions(spans, history_turns, snapshot: StoryState,
                     graph: MemoryGraph) -> list[tuple[str, ...]]:
    """Resolve mention spans to clip-id sets against the current story.

    ``history_turns`` is the dialog so far (dicts with ``frame`` and optional
    ``execution_result``), oldest first. Unresolvable mentions yield an empty
    tuple; this never raises.
    """
    entry_ids = snapshot.clip_ids()
    resolved = []
    for span in spans:
        if span.mention_type == MENTION_ORDINAL:
            index = span.descriptor
            offset = index - 1 if index > 0 else index
            if -len(entry_ids) <= offset < len(entry_ids):
                resolved.append((entry_ids[offset],))
            else:
                resolved.append(())
        elif span.mention_type == MENTION_DEVICE:
            viewer = snapshot.viewer_clip_id()
            resolved.append((viewer,) if viewer else ())
        elif span.mention_type == MENTION_ADJECTIVAL:
            matches = tuple(
                clip_id for clip_id in entry_ids
                if span.descriptor == graph.clip(clip_id).activity
                or span.descriptor in graph.clip(clip_id).attributes)
            resolved.append(matches)
        elif span.mention_type == MENTION_CARRYOVER:
            resolved.append(_resolve_carryover(history_turns, entry_ids))
        else:
            resolved.append(())
    return resolved


def _turn_clip_ids(turn: dict) -> list[str]:
    ids = []
    frame = turn.get("frame") or {}
    for ref in frame.get("refs", []):
        for clip_id in ref.get("clip_ids", []):
            if clip_id not in ids:
                ids.append(clip_id)
    result = turn.get("execution_result") or {}
    for clip_id in result.get("added", []):
        if clip_id not in ids:
            ids.append(clip_id)
    return ids


def _resolve_carryover(history_turns, entry_ids) -> tuple[str, ...]:
    """Most recently mentioned clip, skipping the immediately previous
    utterance's additions, preferring clips still in the story."""
    if not history_turns:
        return ()
    skip = set()
    last = history_turns[-1]
    if last.get("speaker") == "ASSISTANT":
        result = last.get("execution_result") or {}
        skip = set(result.get("added", []))
    entry_set = set(entry_ids)
    fallback = None
    for turn in reversed(history_turns):
        for clip_id in reversed(_turn_clip_ids(turn)):
            if clip_id in skip:
                continue
            if clip_id in entry_set:
                return (clip_id,)
            if fallback is None:
                fallback = clip_id
    return (fallback,) if fallback else ()
