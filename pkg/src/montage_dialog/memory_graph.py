"""Synthetic media collection: clip generation and constraint search.

A MemoryGraph is the immutable grounding context of one dialog: an ordered
list of clips with categorical metadata. Search is strict conjunctive
matching over that metadata.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .errors import ConfigurationError, ValidationError
from .vocabulary import Vocabulary, default_vocabulary

CONSTRAINT_KEYS = ("activity", "time", "location", "object", "participant",
                   "attribute")
# Keys whose clip-side value is a set; a constraint matches via containment.
SET_VALUED_KEYS = ("object", "participant", "attribute")

MIN_DURATION_S = 3
MAX_DURATION_S = 120


@dataclass(frozen=True)
class Clip:
    id: str
    activity: str
    time: str
    location: str
    objects: tuple[str, ...]
    participants: tuple[str, ...]
    attributes: tuple[str, ...]
    duration_s: int

    def matches(self, constraints: dict[str, tuple[str, ...]]) -> bool:
        for key, values in constraints.items():
            if key in SET_VALUED_KEYS:
                pool = getattr(self, key + "s")
                if any(v not in pool for v in values):
                    return False
            else:
                if getattr(self, key) not in values:
                    return False
        return True

    def field_value(self, key: str):
        if key in SET_VALUED_KEYS:
            return getattr(self, key + "s")
        return getattr(self, key)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "activity": self.activity,
            "time": self.time,
            "location": self.location,
            "objects": list(self.objects),
            "participants": list(self.participants),
            "attributes": list(self.attributes),
            "duration_s": self.duration_s,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Clip":
        return cls(
            id=data["id"],
            activity=data["activity"],
            time=data["time"],
            location=data["location"],
            objects=tuple(data["objects"]),
            participants=tuple(data["participants"]),
            attributes=tuple(data["attributes"]),
            duration_s=int(data["duration_s"]),
        )


@dataclass(frozen=True)
class MemoryGraph:
    graph_id: str
    seed: int
    vocabulary: Vocabulary
    clips: tuple[Clip, ...]

    def __post_init__(self):
        if not self.clips:
            raise ConfigurationError("memory graph must contain at least one clip")

    def clip(self, clip_id: str) -> Clip:
        try:
            return self._index()[clip_id]
        except KeyError:
            raise ValidationError(f"unknown clip id '{clip_id}'") from None

    def has_clip(self, clip_id: str) -> bool:
        return clip_id in self._index()

    def _index(self) -> dict[str, Clip]:
        index = getattr(self, "_clip_index", None)
        if index is None:
            index = {clip.id: clip for clip in self.clips}
            object.__setattr__(self, "_clip_index", index)
        return index

    def to_dict(self) -> dict:
        return {
            "graph_id": self.graph_id,
            "seed": self.seed,
            "vocabulary": self.vocabulary.to_dict(),
            "clips": [clip.to_dict() for clip in self.clips],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict) -> "MemoryGraph":
        return cls(
            graph_id=data["graph_id"],
            seed=int(data["seed"]),
            vocabulary=Vocabulary.from_dict(data["vocabulary"]),
            clips=tuple(Clip.from_dict(c) for c in data["clips"]),
        )


@dataclass
class GenConfig:
    n_clips: int = 80
    vocabulary: Vocabulary = field(default_factory=default_vocabulary)
    seed: int = 0
    # Marginal over activities; defaults to uniform.
    activity_weights: dict[str, float] | None = None
    max_objects: int = 4
    max_participants: int = 3
    max_attributes: int = 3

    def resolved_activity_weights(self) -> list[tuple[str, float]]:
        if self.activity_weights is None:
            uniform = 1.0 / len(self.vocabulary.activities)
            return [(a, uniform) for a in self.vocabulary.activities]
        unknown = set(self.activity_weights) - set(self.vocabulary.activities)
        if unknown:
            raise ConfigurationError(
                f"activity_weights names unknown activities: {sorted(unknown)}"
            )
        total = sum(self.activity_weights.values())
        if total <= 0:
            raise ConfigurationError("activity_weights must sum to a positive value")
        return [(a, w / total) for a, w in self.activity_weights.items()]


def _weighted_choice(rng: random.Random, weighted: list[tuple[str, float]]) -> str:
    roll = rng.random()
    acc = 0.0
    for label, weight in weighted:
        acc += weight
        if roll <= acc:
            return label
    return weighted[-1][0]


def _weighted_sample(rng: random.Random, weighted, count: int) -> tuple[str, ...]:
    """Sample up to ``count`` distinct labels, weight-proportional."""
    remaining = list(weighted)
    picked = []
    while remaining and len(picked) < count:
        total = sum(w for _, w in remaining)
        renorm = [(label, w / total) for label, w in remaining]
        choice = _weighted_choice(rng, renorm)
        picked.append(choice)
        remaining = [(label, w) for label, w in remaining if label != choice]
    return tuple(picked)


def generate_collection(config: GenConfig) -> MemoryGraph:
    """Generate a deterministic synthetic media collection."""
    if config.n_clips < 1:
        raise ConfigurationError("n_clips must be >= 1")
    vocab = config.vocabulary.validate()
    activity_weights = config.resolved_activity_weights()
    rng = random.Random(config.seed)
    clips = []
    for index in range(config.n_clips):
        activity = _weighted_choice(rng, activity_weights)
        n_objects = rng.randint(1, config.max_objects)
        n_participants = rng.randint(0, config.max_participants)
        n_attributes = rng.randint(0, config.max_attributes)
        clips.append(Clip(
            id=f"c{index + 1}",
            activity=activity,
            time=rng.choice(vocab.times),
            location=_weighted_choice(
                rng, vocab.weighted_row(activity, "locations")),
            objects=_weighted_sample(
                rng, vocab.weighted_row(activity, "objects"), n_objects),
            participants=tuple(
                sorted(rng.sample(vocab.participants,
                                  min(n_participants, len(vocab.participants))))),
            attributes=_weighted_sample(
                rng, vocab.weighted_row(activity, "attributes"), n_attributes),
            duration_s=rng.randint(MIN_DURATION_S, MAX_DURATION_S),
        ))
    return MemoryGraph(
        graph_id=f"g{config.seed}",
        seed=config.seed,
        vocabulary=vocab,
        clips=tuple(clips),
    )


def normalize_constraints(constraints: dict) -> dict[str, tuple[str, ...]]:
    """Coerce constraint values to tuples of strings, preserving keys."""
    normalized = {}
    for key, value in constraints.items():
        if key not in CONSTRAINT_KEYS:
            raise ValidationError(f"unknown constraint key '{key}'")
        if isinstance(value, (list, tuple, set, frozenset)):
            values = tuple(sorted(str(v) for v in value))
        else:
            values = (str(value),)
        if not values:
            raise ValidationError(f"constraint '{key}' has no values")
        normalized[key] = values
    return normalized


def validate_constraints(vocabulary: Vocabulary, constraints: dict) -> dict:
    normalized = normalize_constraints(constraints)
    if not normalized:
        raise ValidationError("constraint set is empty")
    for key, values in normalized.items():
        pool = vocabulary.values_for(key)
        for value in values:
            if value not in pool:
                raise ValidationError(
                    f"constraint value '{value}' is not in the vocabulary "
                    f"for '{key}'"
                )
    return normalized


def search(graph: MemoryGraph, constraints: dict,
           exclude: set[str] | frozenset[str] = frozenset()) -> list[Clip]:
    """Clips satisfying every constraint, in graph order, minus exclusions."""
    normalized = validate_constraints(graph.vocabulary, constraints)
    return [clip for clip in graph.clips
            if clip.id not in exclude and clip.matches(normalized)]
