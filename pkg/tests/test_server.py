import json

import pytest
from fastapi.testclient import TestClient

from montage_dialog.frames import Frame
from montage_dialog.memory_graph import GenConfig, generate_collection
from montage_dialog.server import create_app
from montage_dialog.story import EngineConfig, StoryState, execute


@pytest.fixture()
def shared_graph():
    return generate_collection(GenConfig(seed=13))


@pytest.fixture()
def client(shared_graph):
    app = create_app(graphs={shared_graph.graph_id: shared_graph})
    return TestClient(app)


def _create(client, graph_id=None):
    body = {"graph_id": graph_id} if graph_id else {}
    response = client.post("/sessions", json=body)
    assert response.status_code == 200
    return response.json()


def test_create_session_and_empty_story(client, shared_graph):
    created = _create(client)
    assert created["graph_id"] == shared_graph.graph_id
    assert created["n_clips"] == len(shared_graph.clips)
    story = client.get(f"/sessions/{created['session_id']}/story")
    assert story.status_code == 200
    assert story.json()["entries"] == []


def test_create_session_without_registry_generates_graph():
    app = create_app()
    local = TestClient(app)
    a = _create(local)
    b = _create(local)
    assert a["graph_id"] != b["graph_id"]
    assert a["n_clips"] > 0


def test_message_executes_and_updates_story(client, shared_graph):
    session = _create(client)["session_id"]
    activity = shared_graph.clips[0].activity
    response = client.post(
        f"/sessions/{session}/messages",
        json={"text": f"Create a story of all {activity} trips"})
    payload = response.json()
    assert response.status_code == 200
    assert payload["status"] in ("OK", "NO_RESULTS")
    assert payload["frame"]["activity"] == "CREATE_STORY"
    assert payload["api_call"].startswith("REQUEST:CREATE_STORY")
    story = client.get(f"/sessions/{session}/story").json()
    assert story == payload["story_snapshot"]
    if payload["status"] == "OK":
        assert story["entries"]


def test_unparseable_leaves_story_unchanged(client):
    session = _create(client)["session_id"]
    before = client.get(f"/sessions/{session}/story").json()
    response = client.post(f"/sessions/{session}/messages",
                           json={"text": "blorp the wug"})
    payload = response.json()
    assert payload["status"] == "UNPARSEABLE"
    assert payload["frame"] is None
    assert payload["api_call"] is None
    assert client.get(f"/sessions/{session}/story").json() == before
    assert "?" in payload["utterance"]


def test_empty_message_is_rejected(client):
    session = _create(client)["session_id"]
    response = client.post(f"/sessions/{session}/messages",
                           json={"text": "   "})
    assert response.status_code == 400


def test_history_contains_both_turns(client):
    session = _create(client)["session_id"]
    client.post(f"/sessions/{session}/messages",
                json={"text": "Create a story of all skiing trips"})
    history = client.get(f"/sessions/{session}/history").json()
    assert history["session_id"] == session
    speakers = [t["speaker"] for t in history["turns"]]
    assert speakers == ["USER", "ASSISTANT"]
    assert [t["turn_id"] for t in history["turns"]] == [1, 2]


def test_clip_lookup(client, shared_graph):
    clip = shared_graph.clips[0]
    response = client.get(f"/clips/{clip.id}")
    assert response.status_code == 200
    payload = response.json()
    assert payload["id"] == clip.id
    assert payload["graph_id"] == shared_graph.graph_id
    assert client.get("/clips/nope").status_code == 404


def test_unknown_session_and_graph_404(client):
    assert client.get("/sessions/nope/story").status_code == 404
    assert client.get("/sessions/nope/history").status_code == 404
    assert client.post("/sessions/nope/messages",
                       json={"text": "hi"}).status_code == 404
    assert client.post("/sessions",
                       json={"graph_id": "nope"}).status_code == 404
    assert client.delete("/sessions/nope").status_code == 404


def test_delete_session(client):
    session = _create(client)["session_id"]
    assert client.delete(f"/sessions/{session}").status_code == 200
    assert client.get(f"/sessions/{session}/story").status_code == 404


def test_persistence_log(tmp_path, shared_graph):
    app = create_app(graphs={shared_graph.graph_id: shared_graph},
                     persist_dir=tmp_path)
    local = TestClient(app)
    session = _create(local)["session_id"]
    local.post(f"/sessions/{session}/messages",
               json={"text": "Create a story of all skiing trips"})
    log_path = tmp_path / f"{session}.jsonl"
    records = [json.loads(line)
               for line in log_path.read_text().splitlines()]
    assert records[0]["event"] == "create"
    assert [r["event"] for r in records[1:]] == ["turn", "turn"]
    assert records[1]["turn"]["speaker"] == "USER"


def test_scripted_session_matches_offline_replay(client, shared_graph):
    """The server's story after a scripted session must equal the state
    obtained by replaying its own api calls through the engine."""
    session = _create(client)["session_id"]
    activity = shared_graph.clips[0].activity
    script = [
        f"Create a story of all {activity} trips",
        "blorp the wug",
        "Remove the first clip from the story.",
        "Move the last clip to the beginning.",
        "Make the first clip 20 seconds long.",
        "Share the story with my family.",
    ]
    for text in script:
        response = client.post(f"/sessions/{session}/messages",
                               json={"text": text})
        assert response.status_code == 200
    history = client.get(f"/sessions/{session}/history").json()
    state = StoryState()
    for turn in history["turns"]:
        if turn["speaker"] == "USER" and turn["frame"] is not None:
            # unchanged-state turns (unparseable) carry a null frame
            assert StoryState.from_dict(turn["story_snapshot"]) == state
            state, _ = execute(state, Frame.from_dict(turn["frame"]),
                               shared_graph, EngineConfig())
    final = StoryState.from_dict(
        client.get(f"/sessions/{session}/story").json())
    assert final == state
