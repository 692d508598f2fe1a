"""Interactive session service: text in, parsed frame plus executed story out.

The rule-based parser stands in for a trained dialog model, so the whole
loop is deterministic and runs offline. All session state lives in an
explicit store; handlers only orchestrate the parse -> resolve -> execute ->
respond pipeline.
"""

from __future__ import annotations

import itertools
import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .errors import ValidationError
from .frames import ACT_REQUEST, ClipRef, Frame
from .linear import serialize_frame
from .memory_graph import GenConfig, MemoryGraph, generate_collection
from .nlu import Lexicon, build_lexicon, parse_utterance, resolve_mentions
from .simulator import SPEAKER_ASSISTANT, SPEAKER_USER, derive_seed
from .story import EngineConfig, StoryState, assistant_frame, execute
from .templates import clarification_utterance, realize


@dataclass
class Session:
    session_id: str
    graph: MemoryGraph
    lexicon: Lexicon
    state: StoryState = field(default_factory=StoryState)
    history: list = field(default_factory=list)
    api_calls: list = field(default_factory=list)
    created_at: float = field(default_factory=time.time)
    lock: threading.Lock = field(default_factory=threading.Lock,
                                 repr=False, compare=False)

    def next_turn_id(self) -> int:
        return len(self.history) + 1


class SessionStore:
    """Thread-safe session map with optional append-only JSONL persistence."""

    def __init__(self, persist_dir=None):
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        self.persist_dir = Path(persist_dir) if persist_dir else None
        if self.persist_dir:
            self.persist_dir.mkdir(parents=True, exist_ok=True)

    def create(self, graph: MemoryGraph) -> Session:
        session = Session(session_id=uuid.uuid4().hex[:12], graph=graph,
                          lexicon=build_lexicon(graph.vocabulary))
        with self._lock:
            self._sessions[session.session_id] = session
        self._append_log(session.session_id,
                         {"event": "create", "graph_id": graph.graph_id,
                          "created_at": session.created_at})
        return session

    def get(self, session_id: str) -> Session | None:
        with self._lock:
            return self._sessions.get(session_id)

    def delete(self, session_id: str) -> bool:
        with self._lock:
            return self._sessions.pop(session_id, None) is not None

    def log_turns(self, session_id: str, turns):
        for turn in turns:
            self._append_log(session_id, {"event": "turn", "turn": turn})

    def _append_log(self, session_id: str, record: dict):
        if not self.persist_dir:
            return
        path = self.persist_dir / f"{session_id}.jsonl"
        with open(path, "a", encoding="utf-8") as handle:
            handle.write(json.dumps(record, sort_keys=True,
                                    separators=(",", ":")) + "\n")


def _build_refs(spans, resolved):
    refs = []
    failed = []
    for span, clip_ids in zip(spans, resolved):
        if not clip_ids:
            failed.append(span.text)
            continue
        refs.append(ClipRef(clip_ids=tuple(clip_ids), role=span.role,
                            mention_type=span.mention_type,
                            mention_text=span.text))
    return tuple(refs), failed


def _response(utterance, snapshot: StoryState, status, frame=None,
              execution_result=None, annotation=None) -> dict:
    return {
        "utterance": utterance,
        "frame": frame.to_dict() if frame is not None else None,
        "api_call": serialize_frame(frame) if frame is not None else None,
        "execution_result": execution_result,
        "story_snapshot": snapshot.to_dict(),
        "status": status,
        "annotation": annotation or {},
    }


def handle_message(session: Session, text: str,
                   store: SessionStore | None = None,
                   engine_config: EngineConfig | None = None) -> dict:
    """Run one user message through the pipeline and append both turns."""
    if not text or not text.strip():
        raise ValidationError("message text must be non-empty")
    with session.lock:
        partial = parse_utterance(text, session.lexicon)
        pre_state = session.state
        annotation = {
            "mentions": [
                {"text": span.text, "mention_type": span.mention_type,
                 "role": span.role} for span in partial.mentions],
            "parsed_activity": partial.activity,
        }
        frame = None
        a_frame = None
        result_dict = None
        if partial.unparseable:
            status = "UNPARSEABLE"
            utterance = clarification_utterance()
        else:
            resolved = resolve_mentions(partial.mentions, session.history,
                                        pre_state, session.graph)
            annotation["resolved"] = [list(ids) for ids in resolved]
            refs, failed = _build_refs(partial.mentions, resolved)
            if failed:
                status = "INVALID_REF"
                utterance = ("Sorry, I couldn't find the clip you meant by "
                             f"'{failed[0]}'.")
            else:
                try:
                    frame = Frame(act=ACT_REQUEST, activity=partial.activity,
                                  slots=partial.slots, refs=refs)
                    new_state, result = execute(pre_state, frame,
                                                session.graph, engine_config)
                except ValidationError as exc:
                    frame = None
                    status = "UNPARSEABLE"
                    utterance = clarification_utterance()
                    annotation["validation_error"] = str(exc)
                else:
                    session.state = new_state
                    session.api_calls.append(frame)
                    a_frame = assistant_frame(result, frame)
                    utterance = realize(a_frame)
                    status = result.status
                    result_dict = result.to_dict()
        user_turn = {
            "turn_id": session.next_turn_id(),
            "speaker": SPEAKER_USER,
            "template_utterance": text,
            "paraphrase": "",
            "frame": frame.to_dict() if frame is not None else None,
            "story_snapshot": pre_state.to_dict(),
        }
        session.history.append(user_turn)
        assistant_turn = {
            "turn_id": session.next_turn_id(),
            "speaker": SPEAKER_ASSISTANT,
            "template_utterance": utterance,
            "paraphrase": "",
            "frame": a_frame.to_dict() if a_frame is not None else None,
            "story_snapshot": session.state.to_dict(),
            "execution_result": result_dict,
        }
        session.history.append(assistant_turn)
        if store is not None:
            store.log_turns(session.session_id, [user_turn, assistant_turn])
        return _response(utterance, session.state, status, frame=frame,
                         execution_result=result_dict, annotation=annotation)


class SessionRequest(BaseModel):
    graph_id: str | None = None


class MessageRequest(BaseModel):
    text: str


def create_app(graphs: dict[str, MemoryGraph] | None = None,
               persist_dir=None, graph_config: GenConfig | None = None,
               graph_seed: int = 7):
    """Build the FastAPI app. ``graphs`` preloads shared collections; with
    none given, each session gets a fresh generated collection."""
    app = FastAPI(title="montage-dialog", version="0.1.0")
    store = SessionStore(persist_dir=persist_dir)
    registry: dict[str, MemoryGraph] = dict(graphs or {})
    preloaded = bool(registry)
    registry_lock = threading.Lock()
    session_counter = itertools.count(1)
    base_config = graph_config or GenConfig(seed=graph_seed)
    app.state.store = store
    app.state.graphs = registry

    def _session_or_404(session_id: str) -> Session:
        session = store.get(session_id)
        if session is None:
            raise HTTPException(status_code=404,
                                detail=f"unknown session '{session_id}'")
        return session

    @app.post("/sessions")
    def create_session(body: SessionRequest | None = None):
        graph_id = body.graph_id if body else None
        with registry_lock:
            if graph_id is not None:
                graph = registry.get(graph_id)
                if graph is None:
                    raise HTTPException(
                        status_code=404, detail=f"unknown graph '{graph_id}'")
            elif preloaded:
                graph = next(iter(registry.values()))
            else:
                # no preloaded collections: every session gets a fresh graph
                index = next(session_counter)
                seed = derive_seed(base_config.seed, index, "session-graph")
                from dataclasses import replace as dc_replace
                graph = generate_collection(dc_replace(base_config, seed=seed))
                registry[graph.graph_id] = graph
        session = store.create(graph)
        return {"session_id": session.session_id,
                "graph_id": graph.graph_id,
                "n_clips": len(graph.clips)}

    @app.post("/sessions/{session_id}/messages")
    def post_message(session_id: str, body: MessageRequest):
        session = _session_or_404(session_id)
        try:
            return handle_message(session, body.text, store=store)
        except ValidationError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    @app.get("/sessions/{session_id}/story")
    def get_story(session_id: str):
        session = _session_or_404(session_id)
        with session.lock:
            return session.state.to_dict()

    @app.get("/sessions/{session_id}/history")
    def get_history(session_id: str):
        session = _session_or_404(session_id)
        with session.lock:
            return {"session_id": session_id,
                    "graph_id": session.graph.graph_id,
                    "turns": list(session.history)}

    @app.get("/clips/{clip_id}")
    def get_clip(clip_id: str):
        with registry_lock:
            for graph in registry.values():
                if graph.has_clip(clip_id):
                    payload = graph.clip(clip_id).to_dict()
                    payload["graph_id"] = graph.graph_id
                    return payload
        raise HTTPException(status_code=404,
                            detail=f"unknown clip '{clip_id}'")

    @app.delete("/sessions/{session_id}")
    def delete_session(session_id: str):
        if not store.delete(session_id):
            raise HTTPException(status_code=404,
                                detail=f"unknown session '{session_id}'")
        return {"deleted": session_id}

    return app
