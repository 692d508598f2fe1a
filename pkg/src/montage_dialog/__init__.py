"""Dialog simulation, annotation, and evaluation tooling for conversational
montage creation over a synthetic media collection."""

from .errors import (
    ConfigurationError, FrameParseError, IngestionError, MontageDialogError,
    SimulationError, UnknownTokenError, ValidationError,
)
from .frames import ClipRef, Frame
from .linear import (
    PromptConfig, build_prompt, cumulative_state, parse_frame,
    serialize_frame,
)
from .memory_graph import (
    Clip, GenConfig, MemoryGraph, generate_collection, search,
)
from .metrics import (
    PRF, corpus_stats, evaluate_predictions, score_coref, score_joint,
    score_slots, transition_flows,
)
from .nlu import Lexicon, build_lexicon, parse_utterance, resolve_mentions
from .simulator import (
    Dialog, SimConfig, generate_dialogs, simulate_corpus, simulate_dialog,
)
from .story import (
    EngineConfig, ExecutionResult, StoryEntry, StoryState, applicable_activities,
    assistant_frame, execute, replay, validate_api_call,
)
from .templates import realize
from .vocabulary import Vocabulary, ingest_annotation_vocab

__version__ = "0.1.0"

__all__ = [
    "Clip", "ClipRef", "ConfigurationError", "Dialog", "EngineConfig",
    "ExecutionResult", "Frame", "FrameParseError", "GenConfig",
    "IngestionError", "Lexicon", "MemoryGraph", "MontageDialogError", "PRF",
    "PromptConfig", "SimConfig", "SimulationError", "StoryEntry",
    "StoryState", "UnknownTokenError", "ValidationError", "Vocabulary",
    "applicable_activities", "assistant_frame", "build_lexicon",
    "build_prompt", "corpus_stats", "cumulative_state",
    "evaluate_predictions", "execute", "generate_collection",
    "generate_dialogs", "ingest_annotation_vocab", "parse_frame",
    "parse_utterance", "realize", "replay", "resolve_mentions",
    "score_coref", "score_joint", "score_slots", "search",
    "serialize_frame", "simulate_corpus", "simulate_dialog",
    "transition_flows", "validate_api_call",
]
