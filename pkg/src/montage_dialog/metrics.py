"""Scoring for slot prediction, coreference resolution, and joint dialog
state tracking, plus corpus analytics and dialog-flow exports."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from .errors import ValidationError
from .frames import Frame
from .linear import parse_frame
from .nlu import Lexicon, parse_utterance, resolve_mentions
from .simulator import SPEAKER_USER, Dialog
from .story import StoryState

_MENTION_FILLER = {"the", "clip", "clips", "one", "ones", "video", "videos",
                   "i", "i'm", "am", "currently", "viewing", "added",
                   "mentioned", "earlier", "to", "last", "a"}


@dataclass(frozen=True)
class PRF:
    precision: float
    recall: float
    f1: float
    true_positives: int
    pred_support: int
    gold_support: int

    @classmethod
    def from_counts(cls, tp: int, pred_support: int, gold_support: int) -> "PRF":
        precision = tp / pred_support if pred_support else 0.0
        recall = tp / gold_support if gold_support else 0.0
        f1 = (2 * precision * recall / (precision + recall)
              if precision + recall > 0 else 0.0)
        return cls(precision, recall, f1, tp, pred_support, gold_support)

    def to_dict(self) -> dict:
        return {"precision": self.precision, "recall": self.recall,
                "f1": self.f1, "true_positives": self.true_positives,
                "pred_support": self.pred_support,
                "gold_support": self.gold_support}


def _slot_pairs(frame: Frame | None) -> set:
    if frame is None:
        return set()
    pairs = set()
    for key, value in frame.slots.items():
        if isinstance(value, tuple):
            pairs.update((key, v) for v in value)
        else:
            pairs.add((key, str(value)))
    return pairs


def _check_alignment_keys(mapping):
    if not isinstance(mapping, dict):
        raise ValidationError("scoring inputs must be keyed by "
                              "(dialog_id, turn_id)")


def score_slots(pred: dict, gold: dict) -> PRF:
    """Micro-averaged PRF over per-turn ``key = value`` slot pairs."""
    _check_alignment_keys(pred)
    _check_alignment_keys(gold)
    tp = pred_support = gold_support = 0
    for key in set(pred) | set(gold):
        pred_pairs = _slot_pairs(pred.get(key))
        gold_pairs = _slot_pairs(gold.get(key))
        tp += len(pred_pairs & gold_pairs)
        pred_support += len(pred_pairs)
        gold_support += len(gold_pairs)
    return PRF.from_counts(tp, pred_support, gold_support)


def score_coref(pred: dict, gold: dict) -> PRF:
    """Micro-averaged PRF over flat clip-id sets; turns where both sides are
    empty contribute nothing."""
    _check_alignment_keys(pred)
    _check_alignment_keys(gold)
    tp = pred_support = gold_support = 0
    for key in set(pred) | set(gold):
        pred_ids = set(pred.get(key) or ())
        gold_ids = set(gold.get(key) or ())
        if not pred_ids and not gold_ids:
            continue
        tp += len(pred_ids & gold_ids)
        pred_support += len(pred_ids)
        gold_support += len(gold_ids)
    return PRF.from_counts(tp, pred_support, gold_support)


def _fold_constraints(frames: list[Frame]):
    """Per-turn cumulative constraint maps under the carryover merge rule."""
    from .frames import ADD_CLIPS, CREATE_STORY, REFINE_SEARCH

    merged: dict = {}
    states = []
    for frame in frames:
        if frame is not None and frame.activity in (
                CREATE_STORY, ADD_CLIPS, REFINE_SEARCH):
            merged.update(frame.constraint_slots())
        states.append(dict(merged))
    return states


def score_joint(pred: dict, gold_dialogs: list[Dialog]) -> dict:
    """Joint accuracy over user turns: intent, cumulative constraint slots,
    and flat clip-id set must all match exactly."""
    total = correct = intent_correct = 0
    per_activity: dict[str, list[int]] = {}
    for dialog in gold_dialogs:
        user_turns = dialog.user_turns()
        gold_frames = [Frame.from_dict(t["frame"]) for t in user_turns]
        pred_frames = [pred.get((dialog.dialog_id, t["turn_id"]))
                       for t in user_turns]
        gold_states = _fold_constraints(gold_frames)
        pred_states = _fold_constraints(pred_frames)
        for gold_frame, pred_frame, gold_state, pred_state in zip(
                gold_frames, pred_frames, gold_states, pred_states):
            total += 1
            stats = per_activity.setdefault(gold_frame.activity, [0, 0])
            intent_ok = (pred_frame is not None
                         and pred_frame.act == gold_frame.act
                         and pred_frame.activity == gold_frame.activity)
            intent_correct += intent_ok
            joint_ok = (
                intent_ok and pred_state == gold_state
                and set(pred_frame.flat_clip_ids())
                == set(gold_frame.flat_clip_ids()))
            stats[0] += joint_ok
            stats[1] += 1
            correct += joint_ok
    return {
        "joint_accuracy": correct / total if total else 0.0,
        "intent_accuracy": intent_correct / total if total else 0.0,
        "n_user_turns": total,
        "per_activity": {
            activity: {"joint_accuracy": ok / n, "n_turns": n}
            for activity, (ok, n) in sorted(per_activity.items())},
    }


def evaluate_predictions(gold_dialogs: list[Dialog],
                         predictions: dict[tuple, str]) -> dict:
    """Full score report from a gold corpus and a linear-frame prediction
    file (already keyed by (dialog_id, turn_id))."""
    gold_frames = {}
    gold_ids = {}
    for dialog in gold_dialogs:
        for turn in dialog.user_turns():
            key = (dialog.dialog_id, turn["turn_id"])
            if key in gold_frames:
                raise ValidationError(
                    f"duplicate gold turn {key[1]} in dialog {key[0]}")
            frame = Frame.from_dict(turn["frame"])
            gold_frames[key] = frame
            gold_ids[key] = frame.flat_clip_ids()
    pred_frames = {}
    pred_ids = {}
    for key, text in predictions.items():
        frame = parse_frame(text)
        pred_frames[key] = frame
        pred_ids[key] = frame.flat_clip_ids()
    report = {
        "slot": score_slots(pred_frames, gold_frames).to_dict(),
        "coref": score_coref(pred_ids, gold_ids).to_dict(),
    }
    report.update(score_joint(pred_frames, gold_dialogs))
    return report


# -- corpus analytics -----------------------------------------------------


def _mean(values):
    return sum(values) / len(values) if values else 0.0


def _std(values):
    if len(values) < 2:
        return 0.0
    mean = _mean(values)
    return math.sqrt(sum((v - mean) ** 2 for v in values) / len(values))


def _descriptor_of(mention_text: str, graph) -> str | None:
    descriptors = set(graph.vocabulary.attributes) | set(
        graph.vocabulary.activities)
    for token in mention_text.lower().split():
        word = token.strip(".,!?")
        if word in descriptors and word not in _MENTION_FILLER:
            return word
    return None


def _candidates_for(ref: dict, snapshot: StoryState, graph,
                    mentioned_ids: set) -> int | None:
    mention_type = ref.get("mention_type")
    if mention_type in ("ORDINAL", "DEVICE_CONTEXT"):
        return len(snapshot.entries)
    if mention_type == "ADJECTIVAL":
        if graph is None:
            return None
        descriptor = _descriptor_of(ref.get("mention_text", ""), graph)
        if descriptor is None:
            return None
        return sum(
            1 for entry in snapshot.entries
            if descriptor == graph.clip(entry.clip_id).activity
            or descriptor in graph.clip(entry.clip_id).attributes)
    if mention_type == "CARRYOVER":
        # distinct clips mentioned in earlier utterances
        return len(mentioned_ids)
    return None


def corpus_stats(dialogs: list[Dialog],
                 graphs: dict | None = None) -> dict:
    """Table-1 style corpus statistics plus the histograms behind the
    utterance-length, activity, candidate, and coreference-distance plots.

    ``graphs`` (graph_id -> MemoryGraph) is needed for the adjectival-
    candidate counts; without it those mentions are skipped and flagged in
    the report metadata.
    """
    user_words, assistant_words = [], []
    utterances_per_dialog = []
    clips_mentioned = []
    clips_per_story = []
    candidates = []
    distances = []
    activity_counter: Counter = Counter()
    user_len_hist: Counter = Counter()
    assistant_len_hist: Counter = Counter()
    candidates_hist: Counter = Counter()
    distance_hist: Counter = Counter()
    skipped_adjectival = 0

    for dialog in dialogs:
        graph = (graphs or {}).get(dialog.graph_id)
        utterances_per_dialog.append(len(dialog.turns))
        mentioned: set = set()
        last_reference: dict[str, int] = {}
        for turn in dialog.turns:
            words = len(turn["template_utterance"].split())
            snapshot = StoryState.from_dict(turn["story_snapshot"])
            clips_per_story.append(len(snapshot.entries))
            frame = turn["frame"]
            if turn["speaker"] == SPEAKER_USER:
                user_words.append(words)
                user_len_hist[words] += 1
                activity_counter[frame["activity"]] += 1
                mentioned_before = set(mentioned)
                for ref in frame.get("refs", []):
                    count = _candidates_for(ref, snapshot, graph,
                                            mentioned_before)
                    if count is None:
                        skipped_adjectival += (
                            ref.get("mention_type") == "ADJECTIVAL")
                    else:
                        candidates.append(count)
                        candidates_hist[count] += 1
                    for clip_id in ref["clip_ids"]:
                        mentioned.add(clip_id)
                        earlier = last_reference.get(clip_id)
                        if earlier is not None:
                            distance = turn["turn_id"] - earlier
                            distances.append(distance)
                            distance_hist[distance] += 1
                        last_reference[clip_id] = turn["turn_id"]
            else:
                assistant_words.append(words)
                assistant_len_hist[words] += 1
                result = turn.get("execution_result") or {}
                for clip_id in result.get("added", []):
                    last_reference[clip_id] = turn["turn_id"]
        clips_mentioned.append(len(mentioned))

    report = {
        "n_dialogs": len(dialogs),
        "n_utterances": sum(utterances_per_dialog),
        "avg_words_user": _mean(user_words),
        "std_words_user": _std(user_words),
        "avg_words_assistant": _mean(assistant_words),
        "std_words_assistant": _std(assistant_words),
        "avg_utterances_per_dialog": _mean(utterances_per_dialog),
        "avg_clips_mentioned_per_dialog": _mean(clips_mentioned),
        "avg_clips_per_story": _mean(clips_per_story),
        "std_clips_per_story": _std(clips_per_story),
        "avg_candidates_per_mention": _mean(candidates),
        "avg_coref_distance": _mean(distances),
        "histograms": {
            "user_utterance_length": dict(sorted(user_len_hist.items())),
            "assistant_utterance_length": dict(
                sorted(assistant_len_hist.items())),
            "request_activity": dict(activity_counter.most_common()),
            "candidates_per_mention": dict(sorted(candidates_hist.items())),
            "coref_distance": dict(sorted(distance_hist.items())),
        },
        "metadata": {
            "candidate_definition": (
                "snapshot clips compatible with the mention descriptor; "
                "ordinal/device mentions count the whole snapshot, "
                "carryover counts distinct clips mentioned in earlier "
                "utterances"),
            "skipped_adjectival_mentions": skipped_adjectival,
        },
    }
    return report


def transition_flows(dialogs: list[Dialog], depth: int = 4) -> dict:
    """Plot-ready dialog-flow graph over the first ``depth`` utterances.

    Nodes are labeled ``ACTIVITY:[A|U][turn]``; edge weights count observed
    transitions between consecutive utterances.
    """
    if depth < 1:
        raise ValidationError("depth must be >= 1")
    node_weights: Counter = Counter()
    link_weights: Counter = Counter()
    for dialog in dialogs:
        labels = []
        for turn in dialog.turns[:depth]:
            utterance = turn["turn_id"]
            letter = "U" if turn["speaker"] == SPEAKER_USER else "A"
            pair = (utterance + 1) // 2
            labels.append(f"{turn['frame']['activity']}:{letter}{pair}")
        for label in labels:
            node_weights[label] += 1
        for source, target in zip(labels, labels[1:]):
            link_weights[(source, target)] += 1
    return {
        "depth": depth,
        "nodes": [{"label": label, "weight": weight}
                  for label, weight in sorted(node_weights.items())],
        "links": [{"source": source, "target": target, "weight": weight}
                  for (source, target), weight in sorted(link_weights.items())],
    }


def second_user_turn_distribution(dialogs: list[Dialog]) -> dict[str, float]:
    counter: Counter = Counter()
    for dialog in dialogs:
        user_turns = dialog.user_turns()
        if len(user_turns) >= 2:
            counter[user_turns[1]["frame"]["activity"]] += 1
    total = sum(counter.values())
    return {activity: count / total for activity, count in counter.items()}


def tv_distance_from_uniform(distribution: dict[str, float]) -> float:
    if not distribution:
        return 0.0
    uniform = 1.0 / len(distribution)
    return 0.5 * sum(abs(p - uniform) for p in distribution.values())


# -- rule-based and trivial coreference baselines -------------------------


def rule_based_coref(dialogs: list[Dialog], graphs: dict) -> dict:
    """Resolve each user turn with the template parser + heuristic resolver;
    returns (dialog_id, turn_id) -> tuple of clip ids."""
    predictions = {}
    for dialog in dialogs:
        graph = graphs[dialog.graph_id]
        lexicon = Lexicon(vocabulary=graph.vocabulary)
        history = []
        for turn in dialog.turns:
            if turn["speaker"] == SPEAKER_USER:
                snapshot = StoryState.from_dict(turn["story_snapshot"])
                partial = parse_utterance(turn["template_utterance"], lexicon)
                resolved = resolve_mentions(partial.mentions, history,
                                            snapshot, graph)
                flat = []
                for ids in resolved:
                    flat.extend(i for i in ids if i not in flat)
                predictions[(dialog.dialog_id, turn["turn_id"])] = tuple(flat)
            history.append(turn)
    return predictions


def previous_turn_coref(dialogs: list[Dialog]) -> dict:
    """Trivial baseline: always predict the clips referenced or added in the
    immediately previous utterance."""
    predictions = {}
    for dialog in dialogs:
        previous_ids: tuple = ()
        for turn in dialog.turns:
            if turn["speaker"] == SPEAKER_USER:
                predictions[(dialog.dialog_id, turn["turn_id"])] = previous_ids
            ids = []
            for ref in turn["frame"].get("refs", []):
                ids.extend(ref["clip_ids"])
            result = turn.get("execution_result") or {}
            ids.extend(result.get("added", []))
            previous_ids = tuple(dict.fromkeys(ids))
    return predictions


def gold_coref(dialogs: list[Dialog]) -> dict:
    gold = {}
    for dialog in dialogs:
        for turn in dialog.user_turns():
            frame = Frame.from_dict(turn["frame"])
            gold[(dialog.dialog_id, turn["turn_id"])] = frame.flat_clip_ids()
    return gold
