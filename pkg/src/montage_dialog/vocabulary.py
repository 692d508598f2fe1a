"""Label vocabulary for the synthetic media collection.

Every clip attribute, slot value, and lexicon gazetteer entry is drawn from a
single Vocabulary so that search, simulation, and parsing agree on the label
space. Label sets are disjoint across fields, which lets the rule-based parser
recover the slot key of a value from the surface word alone.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import ConfigurationError, IngestionError, ValidationError

WEIGHT_TOL = 1e-9

DEFAULT_ACTIVITIES = [
    "skiing", "snowboarding", "surfing", "hiking", "camping", "cycling",
    "fishing", "kayaking", "climbing", "skating", "picnic", "barbecue",
]

DEFAULT_OBJECTS = [
    "dog", "cat", "surfboard", "tent", "bicycle", "kite", "guitar",
    "campfire", "drone", "frisbee", "backpack", "canoe", "skateboard",
    "helmet", "lantern", "cooler", "hammock", "snowman", "sandcastle",
    "paddle", "umbrella", "kayak",
]

DEFAULT_LOCATIONS = [
    "mountains", "beach", "lake", "forest", "desert", "river", "park",
    "canyon", "coast", "meadow", "glacier", "harbor",
]

DEFAULT_ATTRIBUTES = [
    "sunset", "sunrise", "snowy", "rainy", "foggy", "crowded", "aerial",
    "nighttime", "windy", "panoramic",
]

DEFAULT_PARTICIPANTS = [
    "alice", "bob", "carol", "dave", "emma", "frank", "grace", "henry",
]

DEFAULT_TIMES = (
    [str(year) for year in range(2014, 2024)]
    + ["spring", "summer", "autumn", "winter"]
    + [
        "january", "february", "march", "april", "may", "june", "july",
        "august", "september", "october", "november", "december",
    ]
)

# Preferred objects/locations/attributes per activity; order encodes
# decreasing co-occurrence weight.
_COOCCURRENCE_TABLE = {
    "skiing": (
        ["helmet", "backpack", "drone", "snowman"],
        ["mountains", "glacier", "forest"],
        ["snowy", "foggy", "aerial", "sunset"],
    ),
    "snowboarding": (
        ["helmet", "drone", "backpack", "snowman"],
        ["mountains", "glacier"],
        ["snowy", "aerial", "windy", "nighttime"],
    ),
    "surfing": (
        ["surfboard", "dog", "drone", "umbrella"],
        ["beach", "coast", "harbor"],
        ["sunset", "sunrise", "windy", "crowded"],
    ),
    "hiking": (
        ["backpack", "dog", "drone", "helmet"],
        ["mountains", "forest", "canyon", "meadow"],
        ["foggy", "panoramic", "sunrise", "aerial"],
    ),
    "camping": (
        ["tent", "campfire", "lantern", "hammock", "guitar"],
        ["forest", "lake", "mountains", "meadow"],
        ["nighttime", "rainy", "foggy", "sunset"],
    ),
    "cycling": (
        ["bicycle", "helmet", "backpack", "dog"],
        ["park", "coast", "canyon", "meadow"],
        ["sunrise", "windy", "crowded", "panoramic"],
    ),
    "fishing": (
        ["canoe", "paddle", "cooler", "dog"],
        ["lake", "river", "harbor", "coast"],
        ["foggy", "sunrise", "rainy", "panoramic"],
    ),
    "kayaking": (
        ["kayak", "paddle", "helmet", "drone"],
        ["river", "lake", "canyon", "coast"],
        ["aerial", "windy", "sunset", "rainy"],
    ),
    "climbing": (
        ["helmet", "backpack", "drone"],
        ["canyon", "mountains", "glacier"],
        ["aerial", "panoramic", "foggy", "sunrise"],
    ),
    "skating": (
        ["skateboard", "helmet", "dog", "frisbee"],
        ["park", "harbor"],
        ["crowded", "nighttime", "sunset", "windy"],
    ),
    "picnic": (
        ["frisbee", "dog", "cat", "umbrella", "cooler", "kite", "sandcastle"],
        ["park", "meadow", "beach", "lake"],
        ["crowded", "windy", "sunset", "panoramic"],
    ),
    "barbecue": (
        ["cooler", "guitar", "frisbee", "hammock", "lantern"],
        ["park", "beach", "meadow"],
        ["nighttime", "crowded", "sunset", "rainy"],
    ),
}


def _decaying_weights(labels):
    """Geometric-ish weights over a preference-ordered list, normalized."""
    raw = [0.6 ** i for i in range(len(labels))]
    total = sum(raw)
    return [(label, w / total) for label, w in zip(labels, raw)]


@dataclass(frozen=True)
class Vocabulary:
    activities: list[str]
    objects: list[str]
    locations: list[str]
    attributes: list[str]
    participants: list[str]
    times: list[str]
    # activity -> {"objects"|"locations"|"attributes": [(label, weight), ...]}
    cooccurrence: dict[str, dict[str, list[tuple[str, float]]]] = field(
        default_factory=dict
    )

    def validate(self):
        for name in ("activities", "objects", "locations", "attributes",
                     "participants", "times"):
            values = getattr(self, name)
            if not values:
                raise ConfigurationError(f"vocabulary field '{name}' is empty")
            if len(set(values)) != len(values):
                raise ConfigurationError(
                    f"vocabulary field '{name}' contains duplicates"
                )
        for activity, rows in self.cooccurrence.items():
            if activity not in self.activities:
                raise ConfigurationError(
                    f"co-occurrence key '{activity}' is not a known activity"
                )
            for kind, weighted in rows.items():
                pool = getattr(self, kind, None)
                if pool is None:
                    raise ConfigurationError(
                        f"co-occurrence row '{activity}.{kind}' targets an "
                        "unknown field"
                    )
                total = 0.0
                for label, weight in weighted:
                    if label not in pool:
                        raise ConfigurationError(
                            f"co-occurrence label '{label}' missing from "
                            f"vocabulary field '{kind}'"
                        )
                    if weight <= 0:
                        raise ConfigurationError(
                            f"non-positive weight for '{label}' in "
                            f"'{activity}.{kind}'"
                        )
                    total += weight
                if abs(total - 1.0) > WEIGHT_TOL:
                    raise ConfigurationError(
                        f"weights for '{activity}.{kind}' sum to {total}, "
                        "expected 1"
                    )
        return self

    def values_for(self, key: str) -> list[str]:
        """Label pool for a constraint key ('activity', 'time', ...)."""
        return {
            "activity": self.activities,
            "time": self.times,
            "location": self.locations,
            "object": self.objects,
            "participant": self.participants,
            "attribute": self.attributes,
        }[key]

    def weighted_row(self, activity: str, kind: str) -> list[tuple[str, float]]:
        row = self.cooccurrence.get(activity, {})
        if kind in row:
            return row[kind]
        pool = getattr(self, kind)
        return [(label, 1.0 / len(pool)) for label in pool]

    def to_dict(self) -> dict:
        return {
            "activities": list(self.activities),
            "objects": list(self.objects),
            "locations": list(self.locations),
            "attributes": list(self.attributes),
            "participants": list(self.participants),
            "times": list(self.times),
            "cooccurrence": {
                activity: {kind: [[l, w] for l, w in row]
                           for kind, row in rows.items()}
                for activity, rows in self.cooccurrence.items()
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Vocabulary":
        cooc = {
            activity: {kind: [(l, float(w)) for l, w in row]
                       for kind, row in rows.items()}
            for activity, rows in data.get("cooccurrence", {}).items()
        }
        vocab = cls(
            activities=list(data["activities"]),
            objects=list(data["objects"]),
            locations=list(data["locations"]),
            attributes=list(data["attributes"]),
            participants=list(data["participants"]),
            times=list(data["times"]),
            cooccurrence=cooc,
        )
        return vocab.validate()


def default_vocabulary() -> Vocabulary:
    cooccurrence = {
        activity: {
            "objects": _decaying_weights(objects),
            "locations": _decaying_weights(locations),
            "attributes": _decaying_weights(attributes),
        }
        for activity, (objects, locations, attributes)
        in _COOCCURRENCE_TABLE.items()
    }
    return Vocabulary(
        activities=list(DEFAULT_ACTIVITIES),
        objects=list(DEFAULT_OBJECTS),
        locations=list(DEFAULT_LOCATIONS),
        attributes=list(DEFAULT_ATTRIBUTES),
        participants=list(DEFAULT_PARTICIPANTS),
        times=list(DEFAULT_TIMES),
        cooccurrence=cooccurrence,
    ).validate()


def ingest_annotation_vocab(path) -> Vocabulary:
    """Build a Vocabulary from an external category-list file.

    The file is JSON with a top-level ``categories`` list of
    ``{"name": ..., "supercategory": ...}`` entries. Entries whose
    supercategory is ``activity`` become activities; everything else becomes
    an object label. Times/locations/participants/attributes fall back to the
    built-in defaults.
    """
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise IngestionError(f"cannot read '{path}': {exc}") from exc
    if not text.strip():
        raise ValidationError(f"annotation file '{path}' is empty")
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise IngestionError(
            f"invalid JSON in '{path}': {exc.msg}",
            line=exc.lineno, position=exc.colno,
        ) from exc
    categories = document.get("categories")
    if not isinstance(categories, list) or not categories:
        raise ValidationError(
            f"annotation file '{path}' has no 'categories' entries"
        )
    activities: list[str] = []
    objects: list[str] = []
    for index, entry in enumerate(categories):
        if not isinstance(entry, dict) or "name" not in entry:
            raise IngestionError(
                f"category entry {index} lacks a 'name' field", line=index
            )
        name = str(entry["name"]).strip().lower().replace(" ", "-")
        if not name:
            raise IngestionError(f"category entry {index} has an empty name",
                                 line=index)
        bucket = (activities
                  if str(entry.get("supercategory", "")).lower() == "activity"
                  else objects)
        if name not in bucket:
            bucket.append(name)
    base = default_vocabulary()
    vocab = Vocabulary(
        activities=activities or list(base.activities),
        objects=objects or list(base.objects),
        locations=list(base.locations),
        attributes=list(base.attributes),
        participants=list(base.participants),
        times=list(base.times),
        cooccurrence={},
    )
    return vocab.validate()
