"""JSONL corpus reading/writing and dataset splits."""

from __future__ import annotations

import json
import random
from pathlib import Path

from .errors import ValidationError
from .memory_graph import MemoryGraph
from .simulator import Dialog

SPLIT_TOL = 1e-9


def read_jsonl(path):
    records = []
    with open(path, "r", encoding="utf-8") as handle:
        for index, line in enumerate(handle):
            if not line.strip():
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise ValidationError(
                    f"{path}: invalid JSON on line {index + 1}: {exc.msg}"
                ) from exc
    return records


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record, sort_keys=True,
                                    separators=(",", ":")) + "\n")


def load_dialogs(path) -> list[Dialog]:
    dialogs = []
    for index, record in enumerate(read_jsonl(path)):
        try:
            dialogs.append(Dialog.from_dict(record))
        except (KeyError, TypeError) as exc:
            raise ValidationError(
                f"{path}: record {index} violates the dialog schema: {exc}"
            ) from exc
    return dialogs


def load_graphs(path) -> dict[str, MemoryGraph]:
    graphs = {}
    for index, record in enumerate(read_jsonl(path)):
        try:
            graph = MemoryGraph.from_dict(record)
        except (KeyError, TypeError) as exc:
            raise ValidationError(
                f"{path}: record {index} violates the graph schema: {exc}"
            ) from exc
        graphs[graph.graph_id] = graph
    return graphs


def find_graphs_for(corpus_path) -> Path | None:
    """graphs.jsonl conventionally sits next to dialogs.jsonl."""
    sibling = Path(corpus_path).parent / "graphs.jsonl"
    return sibling if sibling.exists() else None


def load_predictions(path) -> dict[tuple[str, int], str]:
    """Prediction JSONL: {dialog_id, turn_id, linear_frame} per line."""
    predictions = {}
    for index, record in enumerate(read_jsonl(path)):
        try:
            key = (record["dialog_id"], int(record["turn_id"]))
            value = record["linear_frame"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(
                f"{path}: record {index} violates the prediction schema: "
                f"{exc}") from exc
        if key in predictions:
            raise ValidationError(
                f"{path}: duplicate prediction for dialog {key[0]} "
                f"turn {key[1]}")
        predictions[key] = value
    return predictions


def export_splits(corpus_path, out_dir, ratios=(0.6, 0.2, 0.2), seed=0):
    """Deterministic dialog-level train/val/test partition."""
    ratios = tuple(float(r) for r in ratios)
    if len(ratios) != 3:
        raise ValidationError("exactly three split ratios are required")
    if any(r < 0 for r in ratios):
        raise ValidationError("split ratios must be nonnegative")
    if abs(sum(ratios) - 1.0) > SPLIT_TOL:
        raise ValidationError(f"split ratios sum to {sum(ratios)}, expected 1")
    records = read_jsonl(corpus_path)
    if not records:
        raise ValidationError(f"corpus '{corpus_path}' is empty")
    order = list(range(len(records)))
    random.Random(seed).shuffle(order)
    n = len(records)
    sizes = [int(n * r) for r in ratios]
    for index in range(n - sum(sizes)):
        sizes[index % 3] += 1
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    names = ("train", "val", "test")
    counts = {}
    cursor = 0
    for name, size in zip(names, sizes):
        picked = sorted(order[cursor:cursor + size])
        write_jsonl(out / f"{name}.jsonl", [records[i] for i in picked])
        counts[name] = size
        cursor += size
    manifest = {"seed": seed, "ratios": list(ratios), "counts": counts,
                "total": n}
    with open(out / "split_manifest.json", "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
    return manifest
