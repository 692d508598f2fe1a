"""Probabilistic agenda-based dialog simulation grounded on the story engine.

Every user turn is sampled from the activities applicable to the projected
story state, executed through the engine, and answered with a templated
assistant turn, so the recorded snapshots replay exactly from the API-call
log. All randomness flows through one per-dialog seed.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import asdict, dataclass, field, replace as dc_replace

from .errors import SimulationError
from .frames import (
    ACT_REQUEST, ADD_CLIPS, CREATE_STORY, MENTION_ADJECTIVAL,
    MENTION_CARRYOVER, MENTION_DEVICE, MENTION_ORDINAL, MODIFY_DURATION,
    POSITIONS, POSITION_AFTER, POSITION_BEFORE, POSITION_FIRST,
    POSITION_LAST, REFINE_SEARCH, REMOVE_CLIPS, REORDER_CLIPS,
    REPLACE_CLIPS, ROLE_ANCHOR, ROLE_REFERENCE, ROLE_TARGET, SHARE_STORY,
    ClipRef, Frame,
)
from .memory_graph import GenConfig, MemoryGraph, generate_collection, search
from .story import (
    STATUS_NO_RESULTS, EngineConfig, StoryState, applicable_activities,
    assistant_frame, execute,
)
from .templates import (
    ORDINAL_WORDS, SHARE_TARGETS, adjectival_mention_text,
    carryover_mention_text, device_mention_text, ordinal_mention_text,
    realize,
)

SPEAKER_USER = "USER"
SPEAKER_ASSISTANT = "ASSISTANT"

# Utterance-count distribution with mean ~13.5 (Table-1 calibration target).
DEFAULT_TURN_DISTRIBUTION = {
    8: 0.10, 10: 0.15, 12: 0.17, 14: 0.20, 16: 0.17, 18: 0.13, 20: 0.08,
}

DEFAULT_SLOTS_PER_REQUEST = {1: 0.60, 2: 0.30, 3: 0.10}

DEFAULT_MENTION_TYPE_WEIGHTS = {
    MENTION_ADJECTIVAL: 0.54,
    MENTION_ORDINAL: 0.20,
    MENTION_DEVICE: 0.06,
    MENTION_CARRYOVER: 0.20,
}


@dataclass
class SimConfig:
    turn_distribution: dict = field(
        default_factory=lambda: dict(DEFAULT_TURN_DISTRIBUTION))
    slots_per_request: dict = field(
        default_factory=lambda: dict(DEFAULT_SLOTS_PER_REQUEST))
    mention_type_weights: dict = field(
        default_factory=lambda: dict(DEFAULT_MENTION_TYPE_WEIGHTS))
    # geometric decay over carryover candidates ranked by recency
    lookback_decay: float = 0.85
    no_results_rate: float = 0.05
    refine_after_no_results: float = 1.0
    self_transition_damping: float = 0.5
    # optional explicit transition rows: previous activity (or START) ->
    # {activity: weight}; defaults to damped-uniform over applicable
    activity_transition: dict | None = None
    add_position_rate: float = 0.35
    replace_reference_rate: float = 0.5
    modify_absolute_rate: float = 0.3
    max_story_len: int = 8
    seed: int = 0

    def engine_config(self) -> EngineConfig:
        return EngineConfig(max_story_len=self.max_story_len)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "SimConfig":
        known = {f for f in cls.__dataclass_fields__}
        config = cls(**{k: v for k, v in data.items() if k in known})
        config.turn_distribution = {
            int(k): float(v) for k, v in config.turn_distribution.items()}
        config.slots_per_request = {
            int(k): float(v) for k, v in config.slots_per_request.items()}
        return config


@dataclass
class Dialog:
    dialog_id: str
    graph_id: str
    turns: list

    def user_turns(self):
        return [t for t in self.turns if t["speaker"] == SPEAKER_USER]

    def to_dict(self) -> dict:
        return {"dialog_id": self.dialog_id, "graph_id": self.graph_id,
                "turns": self.turns}

    @classmethod
    def from_dict(cls, data: dict) -> "Dialog":
        return cls(data["dialog_id"], data["graph_id"], list(data["turns"]))


def _weighted_key(rng: random.Random, weights: dict):
    total = sum(weights.values())
    roll = rng.random() * total
    acc = 0.0
    for key, weight in weights.items():
        acc += weight
        if roll <= acc:
            return key
    return next(reversed(weights))


class _DialogSampler:
    """Stateful helper running one dialog simulation."""

    QUERY_EXTRA_KEYS = ("time", "location", "attribute", "object",
                        "participant")

    def __init__(self, graph: MemoryGraph, config: SimConfig,
                 rng: random.Random):
        self.graph = graph
        self.config = config
        self.rng = rng
        self.engine_config = config.engine_config()
        # clip id -> 1-based utterance index of its latest mention/addition
        self.last_mentioned: dict[str, int] = {}

    # -- query planning ---------------------------------------------------

    def _seed_query(self, n_slots: int, exclude: set[str]) -> dict:
        candidates = [c for c in self.graph.clips if c.id not in exclude]
        if not candidates:
            candidates = list(self.graph.clips)
        clip = self.rng.choice(candidates)
        query = {"activity": clip.activity}
        extra = [key for key in self.QUERY_EXTRA_KEYS
                 if clip.field_value(key)]
        self.rng.shuffle(extra)
        for key in extra[:max(0, n_slots - 1)]:
            value = clip.field_value(key)
            if isinstance(value, tuple):
                value = self.rng.choice(value)
            query[key] = value
        return query

    def _empty_query(self) -> dict | None:
        vocab = self.graph.vocabulary
        for _ in range(25):
            query = {"activity": self.rng.choice(vocab.activities),
                     "time": self.rng.choice(vocab.times)}
            if not search(self.graph, query):
                return query
        return None

    def _search_slots(self, exclude: set[str], allow_empty=True) -> dict:
        if allow_empty and self.rng.random() < self.config.no_results_rate:
            query = self._empty_query()
            if query is not None:
                return query
        n_slots = _weighted_key(self.rng, self.config.slots_per_request)
        return self._seed_query(n_slots, exclude)

    def _refine_slots(self, state: StoryState) -> dict:
        """Overrides that keep the merged query satisfiable."""
        old = {k: v[0] if isinstance(v, tuple) else v
               for k, v in state.last_search.items()}
        keys = list(old) + [k for k in ("time", "location", "attribute")
                            if k not in old]
        self.rng.shuffle(keys)
        for key in keys:
            rest = {k: v for k, v in old.items() if k != key}
            pool = (search(self.graph, rest) if rest
                    else list(self.graph.clips))
            pool = [clip for clip in pool
                    if clip.field_value(key)
                    and clip.field_value(key) != old.get(key)]
            if not pool:
                continue
            clip = self.rng.choice(pool)
            value = clip.field_value(key)
            if isinstance(value, tuple):
                value = self.rng.choice(value)
            return {key: value}
        # Nothing satisfiable with a single override: restate the whole
        # query from a concrete clip (overrides every old key).
        clip = self.rng.choice(self.graph.clips)
        slots = {"activity": clip.activity}
        for key in old:
            if key == "activity":
                continue
            value = clip.field_value(key)
            if isinstance(value, tuple):
                value = self.rng.choice(value) if value else None
            if value is None:
                value = self.rng.choice(self.graph.vocabulary.values_for(key))
            slots[key] = value
        return slots

    # -- mention planning -------------------------------------------------

    def _ordinal_ref(self, state: StoryState, index: int,
                     role=ROLE_TARGET) -> ClipRef:
        size = len(state.entries)
        ordinal = index + 1
        if index == size - 1 and self.rng.random() < 0.5:
            ordinal = -1
        elif index == size - 2 and size >= 3 and self.rng.random() < 0.3:
            ordinal = -2
        return ClipRef(
            clip_ids=(state.entries[index].clip_id,), role=role,
            mention_type=MENTION_ORDINAL,
            mention_text=ordinal_mention_text(ordinal, self.rng))

    def _adjectival_candidates(self, state: StoryState):
        by_descriptor: dict[str, list[str]] = {}
        for entry in state.entries:
            clip = self.graph.clip(entry.clip_id)
            for descriptor in (clip.activity,) + clip.attributes:
                bucket = by_descriptor.setdefault(descriptor, [])
                if entry.clip_id not in bucket:
                    bucket.append(entry.clip_id)
        return by_descriptor

    def _plan_target(self, state: StoryState, utterance_index: int,
                     singleton: bool) -> ClipRef:
        mention_type = _weighted_key(self.rng,
                                     self.config.mention_type_weights)
        if mention_type == MENTION_DEVICE and state.viewer_index is not None:
            return ClipRef(
                clip_ids=(state.viewer_clip_id(),), role=ROLE_TARGET,
                mention_type=MENTION_DEVICE,
                mention_text=device_mention_text(self.rng))
        if mention_type == MENTION_ADJECTIVAL:
            candidates = self._adjectival_candidates(state)
            if singleton:
                candidates = {d: ids for d, ids in candidates.items()
                              if len(ids) == 1}
            if candidates:
                # favor specific descriptors so mentions stay low-ambiguity
                weights = {d: 1.0 / len(ids) ** 2
                           for d, ids in sorted(candidates.items())}
                descriptor = _weighted_key(self.rng, weights)
                ids = candidates[descriptor]
                return ClipRef(
                    clip_ids=tuple(ids), role=ROLE_TARGET,
                    mention_type=MENTION_ADJECTIVAL,
                    mention_text=adjectival_mention_text(
                        descriptor, len(ids) > 1))
        if mention_type == MENTION_CARRYOVER:
            ranked = self._carryover_candidates(state, utterance_index)
            if ranked:
                weights = {clip_id: self.config.lookback_decay ** rank
                           for rank, clip_id in enumerate(ranked)}
                clip_id = _weighted_key(self.rng, weights)
                return ClipRef(
                    clip_ids=(clip_id,), role=ROLE_TARGET,
                    mention_type=MENTION_CARRYOVER,
                    mention_text=carryover_mention_text(self.rng))
        # ORDINAL fallback is always realizable on a non-empty story.
        return self._ordinal_ref(
            state, self.rng.randrange(len(state.entries)))

    def _plan_anchor(self, state: StoryState, index: int, role) -> ClipRef:
        """Anchor/reference mention: singleton adjectival when available,
        ordinal otherwise."""
        clip_id = state.entries[index].clip_id
        if self.rng.random() < 0.7:
            singles = {d: ids for d, ids in
                       self._adjectival_candidates(state).items()
                       if ids == [clip_id]}
            if singles:
                descriptor = self.rng.choice(sorted(singles))
                return ClipRef(
                    clip_ids=(clip_id,), role=role,
                    mention_type=MENTION_ADJECTIVAL,
                    mention_text=adjectival_mention_text(descriptor, False))
        return self._ordinal_ref(state, index, role=role)

    def _carryover_candidates(self, state: StoryState,
                              utterance_index: int) -> list[str]:
        eligible = []
        for entry in state.entries:
            last = self.last_mentioned.get(entry.clip_id)
            if last is not None and utterance_index - last >= 2:
                eligible.append((last, entry.clip_id))
        eligible.sort(key=lambda item: (-item[0], item[1]))
        return [clip_id for _, clip_id in eligible]

    # -- per-activity frame construction ----------------------------------

    def sample_user_frame(self, state: StoryState, utterance_index: int,
                          prev_activity: str | None,
                          last_status: str | None) -> Frame:
        applicable = applicable_activities(state)
        if not state.entries and not state.last_search:
            activity = CREATE_STORY
        elif (last_status == STATUS_NO_RESULTS
                and REFINE_SEARCH in applicable
                and self.rng.random() < self.config.refine_after_no_results):
            activity = REFINE_SEARCH
        else:
            activity = self._sample_activity(applicable, prev_activity)
        builder = {
            CREATE_STORY: self._frame_create,
            ADD_CLIPS: self._frame_add,
            REMOVE_CLIPS: self._frame_remove,
            REPLACE_CLIPS: self._frame_replace,
            REORDER_CLIPS: self._frame_reorder,
            REFINE_SEARCH: self._frame_refine,
            MODIFY_DURATION: self._frame_modify,
            SHARE_STORY: self._frame_share,
        }[activity]
        return builder(state, utterance_index)

    def _sample_activity(self, applicable, prev_activity) -> str:
        rows = self.config.activity_transition or {}
        row = rows.get(prev_activity or "START")
        if row:
            weights = {a: w for a, w in row.items() if a in applicable}
        else:
            weights = {a: 1.0 for a in sorted(applicable)}
        if not weights:
            weights = {a: 1.0 for a in sorted(applicable)}
        if prev_activity in weights:
            weights[prev_activity] *= self.config.self_transition_damping
        return _weighted_key(self.rng, weights)

    def _frame_create(self, state, utterance_index):
        return Frame(ACT_REQUEST, CREATE_STORY,
                     slots=self._search_slots(exclude=set()))

    def _frame_add(self, state, utterance_index):
        slots = self._search_slots(exclude=set(state.clip_ids()))
        refs = ()
        if (state.entries
                and self.rng.random() < self.config.add_position_rate):
            position = self.rng.choice(POSITIONS)
            slots = dict(slots, position=position)
            if position in (POSITION_BEFORE, POSITION_AFTER):
                index = self.rng.randrange(len(state.entries))
                refs = (self._plan_anchor(state, index, ROLE_ANCHOR),)
        return Frame(ACT_REQUEST, ADD_CLIPS, slots=slots, refs=refs)

    def _frame_remove(self, state, utterance_index):
        target = self._plan_target(state, utterance_index, singleton=False)
        return Frame(ACT_REQUEST, REMOVE_CLIPS, refs=(target,))

    def _frame_replace(self, state, utterance_index):
        target = self._plan_target(state, utterance_index, singleton=True)
        use_reference = (len(state.entries) >= 2 and self.rng.random()
                         < self.config.replace_reference_rate)
        if use_reference:
            target_index = state.index_of(target.clip_ids[0])
            others = [i for i in range(len(state.entries))
                      if i != target_index]
            reference = self._plan_anchor(state, self.rng.choice(others),
                                          ROLE_REFERENCE)
            return Frame(ACT_REQUEST, REPLACE_CLIPS,
                         refs=(target, reference))
        n_slots = min(2, _weighted_key(self.rng,
                                       self.config.slots_per_request))
        slots = self._seed_query(n_slots, exclude=set(state.clip_ids()))
        return Frame(ACT_REQUEST, REPLACE_CLIPS, slots=slots,
                     refs=(target,))

    def _frame_reorder(self, state, utterance_index):
        target = self._plan_target(state, utterance_index, singleton=True)
        target_index = state.index_of(target.clip_ids[0])
        position = self.rng.choice(POSITIONS)
        refs = [target]
        slots = {"position": position}
        if position in (POSITION_BEFORE, POSITION_AFTER):
            others = [i for i in range(len(state.entries))
                      if i != target_index]
            refs.append(self._plan_anchor(state, self.rng.choice(others),
                                          ROLE_ANCHOR))
        return Frame(ACT_REQUEST, REORDER_CLIPS, slots=slots,
                     refs=tuple(refs))

    def _frame_refine(self, state, utterance_index):
        return Frame(ACT_REQUEST, REFINE_SEARCH,
                     slots=self._refine_slots(state))

    def _frame_modify(self, state, utterance_index):
        target = self._plan_target(state, utterance_index, singleton=False)
        if self.rng.random() < self.config.modify_absolute_rate:
            slots = {"duration_s": self.rng.randrange(5, 65, 5)}
        else:
            slots = {"duration_change": self.rng.choice(
                ("shorter", "longer"))}
        return Frame(ACT_REQUEST, MODIFY_DURATION, slots=slots,
                     refs=(target,))

    def _frame_share(self, state, utterance_index):
        return Frame(ACT_REQUEST, SHARE_STORY,
                     slots={"share_to": self.rng.choice(SHARE_TARGETS)})

    # -- mention bookkeeping ----------------------------------------------

    def note_mentions(self, frame: Frame, utterance_index: int):
        for ref in frame.refs:
            for clip_id in ref.clip_ids:
                self.last_mentioned[clip_id] = utterance_index

    def note_additions(self, added, utterance_index: int):
        for clip_id in added:
            self.last_mentioned[clip_id] = utterance_index


def simulate_dialog(graph: MemoryGraph, config: SimConfig,
                    seed: int, dialog_id: str = "d0001") -> Dialog:
    """Generate one fully annotated dialog, deterministic per seed."""
    if len({clip.activity for clip in graph.clips}) < 2:
        raise SimulationError(
            "memory graph has fewer than 2 distinct activities; generate a "
            "larger or more diverse collection")
    rng = random.Random(seed)
    sampler = _DialogSampler(graph, config, rng)
    budget = _weighted_key(rng, config.turn_distribution)
    state = StoryState()
    turns: list[dict] = []
    prev_activity = None
    last_status = None
    while len(turns) < budget:
        utterance_index = len(turns) + 1
        frame = sampler.sample_user_frame(state, utterance_index,
                                          prev_activity, last_status)
        utterance = realize(frame, rng)
        turns.append({
            "turn_id": utterance_index,
            "speaker": SPEAKER_USER,
            "template_utterance": utterance,
            "paraphrase": "",
            "frame": frame.to_dict(),
            "story_snapshot": state.to_dict(),
        })
        sampler.note_mentions(frame, utterance_index)
        state, result = execute(state, frame, graph,
                                sampler.engine_config)
        a_frame = assistant_frame(result, frame)
        turns.append({
            "turn_id": utterance_index + 1,
            "speaker": SPEAKER_ASSISTANT,
            "template_utterance": realize(a_frame, rng),
            "paraphrase": "",
            "frame": a_frame.to_dict(),
            "story_snapshot": state.to_dict(),
            "execution_result": result.to_dict(),
        })
        sampler.note_additions(result.added, utterance_index + 1)
        prev_activity = frame.activity
        last_status = result.status
    return Dialog(dialog_id=dialog_id, graph_id=graph.graph_id, turns=turns)


def derive_seed(seed: int, index: int, salt: str = "") -> int:
    digest = hashlib.sha256(f"{seed}:{index}:{salt}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def config_digest(graph_config: GenConfig, sim_config: SimConfig) -> str:
    payload = json.dumps(
        {"graph": {"n_clips": graph_config.n_clips,
                   "vocabulary": graph_config.vocabulary.to_dict(),
                   "activity_weights": graph_config.activity_weights},
         "sim": sim_config.to_dict()},
        sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def generate_dialogs(n: int, graph_config: GenConfig, sim_config: SimConfig,
                     seed: int):
    """Yield ``(Dialog, MemoryGraph)`` pairs, one fresh graph per dialog."""
    if n < 1:
        raise SimulationError("dialog count must be >= 1")
    width = max(4, len(str(n)))
    for index in range(1, n + 1):
        graph_seed = derive_seed(seed, index, "graph")
        graph_config_i = dc_replace(graph_config, seed=graph_seed)
        graph = generate_collection(graph_config_i)
        dialog_seed = derive_seed(seed, index, "dialog")
        dialog = simulate_dialog(graph, sim_config, dialog_seed,
                                 dialog_id=f"d{index:0{width}d}")
        yield dialog, graph


def simulate_corpus(n: int, graph_config: GenConfig, sim_config: SimConfig,
                    seed: int, out_dir) -> dict:
    """Write dialogs.jsonl, graphs.jsonl, and manifest.json under out_dir."""
    from pathlib import Path

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    dialog_path = out / "dialogs.jsonl"
    graph_path = out / "graphs.jsonl"
    n_utterances = 0
    with open(dialog_path, "w", encoding="utf-8") as dialog_file, \
            open(graph_path, "w", encoding="utf-8") as graph_file:
        for dialog, graph in generate_dialogs(n, graph_config, sim_config,
                                              seed):
            dialog_file.write(json.dumps(dialog.to_dict(), sort_keys=True,
                                         separators=(",", ":")) + "\n")
            graph_file.write(graph.to_json() + "\n")
            n_utterances += len(dialog.turns)
    manifest = {
        "n_dialogs": n,
        "n_utterances": n_utterances,
        "seed": seed,
        "config_digest": config_digest(graph_config, sim_config),
        "dialogs": dialog_path.name,
        "graphs": graph_path.name,
    }
    with open(out / "manifest.json", "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
    return manifest
