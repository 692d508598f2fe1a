"""Template realization of frames into utterances.

The template bank and the rule-based lexicon are designed together: every
slot value appears as a whole word, clip mentions follow a small set of cue
patterns, and fixed filler words never collide with vocabulary labels. That
co-design is what makes parse(realize(frame)) exact on intent and slots.
"""

from __future__ import annotations

import random

from .errors import ConfigurationError
from .frames import (
    ACT_INFORM, ACT_REQUEST, ADD_CLIPS, CREATE_STORY, MODIFY_DURATION,
    POSITION_AFTER, POSITION_BEFORE, POSITION_FIRST, POSITION_LAST,
    REFINE_SEARCH, REMOVE_CLIPS, REORDER_CLIPS, REPLACE_CLIPS, ROLE_ANCHOR,
    ROLE_REFERENCE, ROLE_TARGET, SHARE_STORY, Frame,
)

ORDINAL_WORDS = {
    1: "first", 2: "second", 3: "third", 4: "fourth", 5: "fifth",
    6: "sixth", 7: "seventh", 8: "eighth",
    -1: "last", -2: "second to the last",
}
ORDINAL_INDEX = {word: index for index, word in ORDINAL_WORDS.items()}
ORDINAL_INDEX["second to last"] = -2

PHRASE_NOUNS = ("trips", "moments", "clips", "memories", "footage")

SHARE_TARGETS = ("family", "friends", "grandma", "everyone")


def ordinal_mention_text(index: int, rng: random.Random | None = None) -> str:
    """Surface text for a 1-based (or negative, from-the-end) position."""
    word = ORDINAL_WORDS[index]
    noun = "one" if rng is not None and rng.random() < 0.4 else "clip"
    return f"the {word} {noun}"


def adjectival_mention_text(descriptor: str, plural: bool) -> str:
    return f"the {descriptor} clips" if plural else f"the {descriptor} clip"


def device_mention_text(rng: random.Random | None = None) -> str:
    options = ("the one I'm currently viewing", "the clip I'm viewing")
    return options[0] if rng is None else rng.choice(options)


def carryover_mention_text(rng: random.Random | None = None) -> str:
    options = ("the one I added earlier", "the clip I mentioned earlier")
    return options[0] if rng is None else rng.choice(options)


def constraint_phrase(slots: dict, rng: random.Random | None = None) -> str:
    """Noun phrase naming every constraint value exactly once.

    Filler words here are deliberately outside the vocabulary and outside
    every lexicon trigger set, so the parser can recover the slot map by a
    plain gazetteer scan.
    """
    noun = "trips" if rng is None else rng.choice(PHRASE_NOUNS)
    parts = []
    activities = slots.get("activity", ())
    if activities:
        parts.append(f"all {' and '.join(activities)} {noun}")
    else:
        parts.append("everything")
    if "time" in slots:
        parts.append("in " + " and ".join(slots["time"]))
    if "location" in slots:
        parts.append("at the " + " and the ".join(slots["location"]))
    if "object" in slots:
        parts.append("with " + " and ".join(slots["object"]))
    if "participant" in slots:
        parts.append("featuring " + " and ".join(slots["participant"]))
    if "attribute" in slots:
        parts.append("that look " + " and ".join(slots["attribute"]))
    return " ".join(parts)


def _position_phrase(frame: Frame, anchor_text: str | None,
                     front_word: str, back_word: str) -> str:
    position = frame.slots.get("position")
    if position == POSITION_FIRST:
        return front_word
    if position == POSITION_LAST:
        return back_word
    if position == POSITION_BEFORE:
        return f"right before {anchor_text}"
    if position == POSITION_AFTER:
        return f"right after {anchor_text}"
    return back_word


# Placeholders: {P} constraint phrase, {T} target mention, {A} anchor
# mention, {R} reference mention, {POS} position phrase, {N} seconds,
# {CHANGE} shorter/longer, {S} share target, {COUNT_CLIPS} "3 clips".
REQUEST_TEMPLATES = {
    CREATE_STORY: {
        "default": [
            "Create a story of {P}",
            "Could you create a story of {P} for me?",
            "Please make me a story with {P}.",
            "Hey, let's put together a story of {P} now.",
        ],
    },
    ADD_CLIPS: {
        "plain": [
            "Add {P} to the story.",
            "Could you also add {P} to the story for me?",
            "Please add {P} to this story as well.",
        ],
        "positioned": [
            "Add {P} {POS} of the story.",
            "Could you add {P} {POS} for me?",
            "Please add {P} {POS} of this story.",
        ],
    },
    REMOVE_CLIPS: {
        "default": [
            "Remove {T} from the story.",
            "Please take out {T} from the story for me.",
            "Could you delete {T} from my story?",
            "I do not really like {T}, please remove it.",
        ],
    },
    REPLACE_CLIPS: {
        "reference": [
            "Remove {T} and replace it with something similar to {R}.",
            "Replace {T} with something more similar to {R}, please.",
            "Could you swap {T} for something similar to {R}?",
        ],
        "slots": [
            "Replace {T} with {P}.",
            "Could you swap {T} for {P} in the story?",
            "Please replace {T} with {P} for me.",
        ],
    },
    REORDER_CLIPS: {
        "default": [
            "Move {T} {POS} of the story.",
            "Could you move {T} {POS} for me?",
            "Please move {T} {POS} in this story.",
        ],
    },
    REFINE_SEARCH: {
        "default": [
            "Actually, only keep {P} in the story.",
            "Narrow it down to just {P} for me, please.",
            "Hmm, how about {P} for this story instead?",
        ],
    },
    MODIFY_DURATION: {
        "relative": [
            "Make {T} a bit {CHANGE} in the story.",
            "Could you make {T} somewhat {CHANGE} for me?",
            "I want {T} to run {CHANGE} than it does now.",
        ],
        "absolute": [
            "Set {T} to exactly {N} seconds for me.",
            "Make {T} exactly {N} seconds long, please.",
            "Could you set {T} to about {N} seconds?",
        ],
    },
    SHARE_STORY: {
        "default": [
            "Share this story with {S} once it looks good.",
            "Could you send this story to {S} for me?",
            "Please post this story to {S} when it is ready.",
        ],
    },
}

INFORM_TEMPLATES = {
    CREATE_STORY: {
        "ok": [
            "Done, I created a story with {COUNT_CLIPS} for you.",
            "All set, your new story now has {COUNT_CLIPS} in it.",
            "Okay, I put a fresh story together with {COUNT_CLIPS}.",
        ],
        "no_results": [
            "Sorry, I could not find any clips matching your request.",
            "I did not find anything matching that, maybe refine the search.",
            "No clips matched that search, perhaps try some different filters.",
        ],
    },
    ADD_CLIPS: {
        "ok": [
            "Done, I added {COUNT_CLIPS} to your story just now.",
            "All set, {COUNT_CLIPS} went into the story for you.",
            "Okay, your story grew by {COUNT_CLIPS} with that search.",
        ],
        "no_results": [
            "Sorry, I could not find anything new matching that request.",
            "I found no additional clips for that, maybe loosen the filters.",
            "Nothing new matched that search, so the story is unchanged.",
        ],
    },
    REMOVE_CLIPS: {
        "ok": [
            "Done, I removed {COUNT_CLIPS} from your story.",
            "All set, {COUNT_CLIPS} taken out of the story for you.",
            "Okay, I deleted {COUNT_CLIPS} from the story as asked.",
        ],
    },
    REPLACE_CLIPS: {
        "ok": [
            "Done, I made that swap in your story for you.",
            "All set, I replaced it with the closest match I found.",
            "Okay, the swap is done and your story is updated.",
        ],
        "no_results": [
            "Sorry, I could not find a good replacement for that clip.",
            "I found nothing similar enough to swap in, story unchanged.",
            "No suitable replacement turned up, so I left the story alone.",
        ],
    },
    REORDER_CLIPS: {
        "ok": [
            "Done, I moved that clip to its new spot for you.",
            "All set, the story order is updated the way you asked.",
            "Okay, I rearranged the story with that clip moved over.",
        ],
    },
    REFINE_SEARCH: {
        "ok": [
            "Done, I updated the story to match the narrowed search.",
            "All set, the story now reflects your refined search terms.",
            "Okay, I refreshed the story with those updated filters applied.",
        ],
        "no_results": [
            "Sorry, nothing matches the refined search, so nothing changed.",
            "That refinement matched no clips, the story stays as it was.",
            "No clips fit the narrowed search, maybe relax a filter.",
        ],
    },
    MODIFY_DURATION: {
        "ok": [
            "Done, I adjusted the duration of that clip for you.",
            "All set, the clip timing is updated the way you wanted.",
            "Okay, I changed how long that clip plays in the story.",
        ],
    },
    SHARE_STORY: {
        "ok": [
            "Done, I shared the finished story just as you asked.",
            "All set, the story is on its way to them now.",
            "Okay, your story has been shared with them successfully.",
        ],
    },
}

INVALID_REF_TEMPLATES = [
    "Sorry, I could not tell which clip you meant there.",
    "I could not match that reference to a clip in the story.",
    "Hmm, that clip reference did not line up with the current story.",
]

CLARIFICATION_TEMPLATES = [
    "Sorry, I did not catch that, could you rephrase your request?",
    "I am not sure what you want me to do, could you rephrase?",
]


def _mention(frame: Frame, role: str) -> str | None:
    for ref in frame.refs:
        if ref.role == role:
            return ref.mention_text
    return None


def _count_clips(count: int) -> str:
    return "1 clip" if count == 1 else f"{count} clips"


def _request_variant(frame: Frame) -> str:
    if frame.activity == ADD_CLIPS:
        return "positioned" if "position" in frame.slots else "plain"
    if frame.activity == REPLACE_CLIPS:
        return "reference" if _mention(frame, ROLE_REFERENCE) else "slots"
    if frame.activity == MODIFY_DURATION:
        return "absolute" if "duration_s" in frame.slots else "relative"
    return "default"


def realize(frame: Frame, rng: random.Random | None = None) -> str:
    """Render one frame as a templated utterance.

    ``rng=None`` deterministically picks the first template of the matching
    variant; otherwise the template (and minor phrasing) is sampled.
    """
    if frame.act == ACT_REQUEST:
        bank = REQUEST_TEMPLATES.get(frame.activity, {})
        variant = _request_variant(frame)
        templates = bank.get(variant)
        if not templates:
            raise ConfigurationError(
                f"no template for REQUEST:{frame.activity} ({variant})")
        fields = {
            "P": constraint_phrase(frame.constraint_slots(), rng),
            "T": _mention(frame, ROLE_TARGET) or "",
            "R": _mention(frame, ROLE_REFERENCE) or "",
            "S": frame.slots.get("share_to", ""),
            "N": frame.slots.get("duration_s", ""),
            "CHANGE": frame.slots.get("duration_change", ""),
            "POS": _position_phrase(
                frame, _mention(frame, ROLE_ANCHOR),
                *(("to the front", "to the end")
                  if frame.activity == REORDER_CLIPS
                  else ("at the beginning", "at the end"))),
        }
    elif frame.act == ACT_INFORM:
        status = frame.slots.get("status", "ok")
        if status == "invalid_ref":
            templates = INVALID_REF_TEMPLATES
        else:
            bank = INFORM_TEMPLATES.get(frame.activity, {})
            templates = bank.get(status)
            if not templates:
                raise ConfigurationError(
                    f"no template for INFORM:{frame.activity} ({status})")
        fields = {"COUNT_CLIPS": _count_clips(frame.slots.get("count", 0))}
    else:
        raise ConfigurationError(f"unknown act '{frame.act}'")
    template = templates[0] if rng is None else rng.choice(templates)
    return template.format(**fields)


def clarification_utterance(rng: random.Random | None = None) -> str:
    return (CLARIFICATION_TEMPLATES[0] if rng is None
            else rng.choice(CLARIFICATION_TEMPLATES))
