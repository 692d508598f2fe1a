"""Command-line entry points for corpus generation, analytics, scoring,
splits, and the interactive session server.

Exit codes: 0 success, 2 validation error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .corpus_io import (
    export_splits, find_graphs_for, load_dialogs, load_graphs,
    load_predictions, write_jsonl,
)
from .errors import MontageDialogError, ValidationError
from .frames import (
    ACT_REQUEST, MENTION_UNSPECIFIED, ROLE_TARGET, ClipRef, Frame,
)
from .linear import serialize_frame
from .memory_graph import GenConfig, MemoryGraph, generate_collection
from .metrics import (
    corpus_stats, evaluate_predictions, gold_coref, previous_turn_coref,
    rule_based_coref, score_coref, transition_flows,
)
from .simulator import SimConfig, simulate_corpus

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3


def _emit(payload: dict, out_path: str | None):
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
    else:
        print(text)


def _load_sim_config(path: str | None) -> SimConfig:
    if not path:
        return SimConfig()
    with open(path, "r", encoding="utf-8") as handle:
        return SimConfig.from_dict(json.load(handle))


def _load_graph_registry(path: str) -> dict[str, MemoryGraph]:
    # Accepts either a graphs.jsonl corpus sidecar or a single graph JSON.
    with open(path, "r", encoding="utf-8") as handle:
        head = handle.read(1)
    if not head:
        raise ValidationError(f"graph file '{path}' is empty")
    try:
        graphs = load_graphs(path)
    except ValidationError:
        with open(path, "r", encoding="utf-8") as handle:
            graph = MemoryGraph.from_dict(json.load(handle))
        graphs = {graph.graph_id: graph}
    return graphs


def _graphs_for_corpus(corpus: str, graphs_arg: str | None):
    path = graphs_arg or find_graphs_for(corpus)
    return load_graphs(path) if path else {}


def cmd_gen_graph(args) -> int:
    config = GenConfig(n_clips=args.n_clips, seed=args.seed)
    graph = generate_collection(config)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(graph.to_json() + "\n")
        print(f"wrote graph {graph.graph_id} ({len(graph.clips)} clips) "
              f"to {args.out}")
    else:
        print(graph.to_json())
    return EXIT_OK


def cmd_simulate(args) -> int:
    sim_config = _load_sim_config(args.config)
    graph_config = GenConfig(n_clips=args.n_clips, seed=args.seed)
    started = time.perf_counter()
    manifest = simulate_corpus(args.n, graph_config, sim_config,
                               seed=args.seed, out_dir=args.out_dir)
    elapsed = time.perf_counter() - started
    print(f"simulated {manifest['n_dialogs']} dialogs "
          f"({manifest['n_utterances']} utterances) in {elapsed:.1f}s "
          f"-> {args.out_dir}")
    return EXIT_OK


def cmd_stats(args) -> int:
    dialogs = load_dialogs(args.corpus)
    graphs = _graphs_for_corpus(args.corpus, args.graphs)
    _emit(corpus_stats(dialogs, graphs), args.out)
    return EXIT_OK


def cmd_flows(args) -> int:
    dialogs = load_dialogs(args.corpus)
    _emit(transition_flows(dialogs, depth=args.depth), args.out)
    return EXIT_OK


def cmd_score(args) -> int:
    gold = load_dialogs(args.gold)
    predictions = load_predictions(args.pred)
    _emit(evaluate_predictions(gold, predictions), args.out)
    return EXIT_OK


def cmd_baseline(args) -> int:
    """Run the rule-based pipeline over a corpus; write predictions and
    report coref PRF against gold and the previous-turn baseline."""
    dialogs = load_dialogs(args.corpus)
    graphs = _graphs_for_corpus(args.corpus, args.graphs)
    if not graphs:
        raise ValidationError(
            "baseline needs the graphs.jsonl sidecar (pass --graphs)")
    predicted = rule_based_coref(dialogs, graphs)
    gold = gold_coref(dialogs)
    trivial = previous_turn_coref(dialogs)
    report = {
        "rule_based_coref": score_coref(predicted, gold).to_dict(),
        "previous_turn_coref": score_coref(trivial, gold).to_dict(),
    }
    if args.out:
        records = []
        for dialog in dialogs:
            for turn in dialog.user_turns():
                key = (dialog.dialog_id, turn["turn_id"])
                frame = Frame.from_dict(turn["frame"])
                ids = predicted.get(key, ())
                refs = ((ClipRef(clip_ids=tuple(ids), role=ROLE_TARGET,
                                 mention_type=MENTION_UNSPECIFIED),)
                        if ids else ())
                pred_frame = Frame(act=ACT_REQUEST, activity=frame.activity,
                                   slots=frame.slots, refs=refs)
                records.append({"dialog_id": dialog.dialog_id,
                                "turn_id": turn["turn_id"],
                                "linear_frame": serialize_frame(pred_frame)})
        write_jsonl(args.out, records)
        report["predictions"] = args.out
    _emit(report, None)
    return EXIT_OK


def cmd_split(args) -> int:
    ratios = tuple(float(r) for r in args.ratios.split(","))
    manifest = export_splits(args.corpus, args.out_dir, ratios=ratios,
                             seed=args.seed)
    print(json.dumps(manifest, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    graphs = _load_graph_registry(args.graph) if args.graph else None
    app = create_app(graphs=graphs, persist_dir=args.persist_dir)
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="montage-dialog",
        description="Simulate, analyze, and serve montage-editing dialogs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-graph", help="generate a synthetic clip collection")
    p.add_argument("--n-clips", type=int, default=80)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gen_graph)

    p = sub.add_parser("simulate", help="generate an annotated dialog corpus")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--config", default=None,
                   help="JSON file with simulator config overrides")
    p.add_argument("--n-clips", type=int, default=80)
    p.add_argument("--out-dir", default="corpus")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("stats", help="corpus statistics report")
    p.add_argument("--corpus", required=True)
    p.add_argument("--graphs", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("flows", help="dialog-flow graph export")
    p.add_argument("--corpus", required=True)
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_flows)

    p = sub.add_parser("score", help="score linear-frame predictions")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("baseline",
                       help="run the rule-based pipeline over a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--graphs", default=None)
    p.add_argument("--out", default=None,
                   help="write predictions JSONL here")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("split", help="export train/val/test splits")
    p.add_argument("--corpus", required=True)
    p.add_argument("--ratios", default="0.6,0.2,0.2")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default="splits")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("serve", help="run the interactive session server")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--graph", default=None,
                   help="graph JSON or graphs.jsonl to serve sessions from")
    p.add_argument("--persist-dir", default=None)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except MontageDialogError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except json.JSONDecodeError as exc:
        print(f"i/o error: invalid JSON: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
