import pytest

from montage_dialog.errors import ValidationError
from montage_dialog.frames import (
    ACT_INFORM, ACT_REQUEST, ADD_CLIPS, CREATE_STORY, MODIFY_DURATION,
    REFINE_SEARCH, REMOVE_CLIPS, REORDER_CLIPS, REPLACE_CLIPS, ROLE_ANCHOR,
    ROLE_REFERENCE, ROLE_TARGET, SHARE_STORY, MENTION_ORDINAL,
    MENTION_UNSPECIFIED, ClipRef, Frame,
)
from montage_dialog.memory_graph import Clip, MemoryGraph
from montage_dialog.story import (
    STATUS_INVALID_REF, STATUS_NO_RESULTS, STATUS_OK, EngineConfig,
    StoryEntry, StoryState, applicable_activities, assistant_frame, execute,
    replay, validate_api_call,
)
from montage_dialog.vocabulary import default_vocabulary


def _clip(cid, activity, time, attributes=(), duration=10):
    return Clip(id=cid, activity=activity, time=time, location="mountain",
                objects=("snowboard",), participants=("alice",),
                attributes=tuple(attributes), duration_s=duration)


@pytest.fixture(scope="module")
def tiny_graph():
    clips = (
        _clip("c1", "skiing", "2018", ("sunset",)),
        _clip("c2", "skiing", "2017", ("snowy",)),
        _clip("c3", "surfing", "2018", ("sunset",)),
        _clip("c4", "skiing", "2018", ("snowy", "sunset")),
        _clip("c5", "surfing", "2019"),
    )
    return MemoryGraph(graph_id="gtest", seed=0,
                       vocabulary=default_vocabulary(), clips=clips)


def _target(*ids, role=ROLE_TARGET):
    return ClipRef(clip_ids=tuple(ids), role=role,
                   mention_type=MENTION_UNSPECIFIED)


def _create(graph, **slots):
    call = Frame(ACT_REQUEST, CREATE_STORY, slots=slots)
    return execute(StoryState(), call, graph)


def test_create_story_canonical_query(tiny_graph):
    state, result = _create(tiny_graph, activity="skiing", time="2018")
    assert result.status == STATUS_OK
    assert state.clip_ids() == ("c1", "c4")
    assert state.viewer_index == 0
    assert state.last_search == {"activity": ("skiing",), "time": ("2018",)}


def test_create_caps_story_length(tiny_graph):
    call = Frame(ACT_REQUEST, CREATE_STORY, slots={"activity": "skiing"})
    state, result = execute(StoryState(), call, tiny_graph,
                            EngineConfig(max_story_len=2))
    assert state.clip_ids() == ("c1", "c2")


def test_create_no_results_keeps_state(tiny_graph):
    state, result = _create(tiny_graph, activity="skiing", time="2014")
    assert result.status == STATUS_NO_RESULTS
    assert state.entries == ()
    assert state.last_search == {"activity": ("skiing",), "time": ("2014",)}


def test_add_appends_and_never_duplicates(tiny_graph):
    state, _ = _create(tiny_graph, activity="skiing", time="2018")
    call = Frame(ACT_REQUEST, ADD_CLIPS, slots={"activity": "skiing"})
    state, result = execute(state, call, tiny_graph)
    assert result.status == STATUS_OK
    assert state.clip_ids() == ("c1", "c4", "c2")
    assert len(set(state.clip_ids())) == len(state.clip_ids())


def test_add_with_position_first(tiny_graph):
    state, _ = _create(tiny_graph, activity="skiing", time="2018")
    call = Frame(ACT_REQUEST, ADD_CLIPS,
                 slots={"activity": "surfing", "position": "first"})
    state, _ = execute(state, call, tiny_graph)
    assert state.clip_ids()[:2] == ("c3", "c5")


def test_add_before_anchor(tiny_graph):
    state, _ = _create(tiny_graph, activity="skiing", time="2018")
    call = Frame(ACT_REQUEST, ADD_CLIPS,
                 slots={"activity": "surfing", "time": "2019",
                        "position": "before"},
                 refs=(_target("c4", role=ROLE_ANCHOR),))
    state, _ = execute(state, call, tiny_graph)
    assert state.clip_ids() == ("c1", "c5", "c4")


def test_remove_clips(tiny_graph):
    state, _ = _create(tiny_graph, activity="skiing")
    call = Frame(ACT_REQUEST, REMOVE_CLIPS, refs=(_target("c2"),))
    new_state, result = execute(state, call, tiny_graph)
    assert result.status == STATUS_OK
    assert result.removed == ("c2",)
    assert len(new_state.entries) == len(state.entries) - 1


def test_remove_unknown_target_invalid_ref(tiny_graph):
    state, _ = _create(tiny_graph, activity="skiing", time="2018")
    call = Frame(ACT_REQUEST, REMOVE_CLIPS, refs=(_target("c3"),))
    new_state, result = execute(state, call, tiny_graph)
    assert result.status == STATUS_INVALID_REF
    assert new_state == state


def test_reorder_to_front(tiny_graph):
    state, _ = _create(tiny_graph, activity="skiing")  # c1, c2, c4
    call = Frame(ACT_REQUEST, REORDER_CLIPS, slots={"position": "first"},
                 refs=(_target("c4"),))
    new_state, result = execute(state, call, tiny_graph)
    assert new_state.clip_ids() == ("c4", "c1", "c2")
    assert sorted(new_state.clip_ids()) == sorted(state.clip_ids())


def test_reorder_after_anchor(tiny_graph):
    state, _ = _create(tiny_graph, activity="skiing")  # c1, c2, c4
    call = Frame(ACT_REQUEST, REORDER_CLIPS, slots={"position": "after"},
                 refs=(_target("c1"), _target("c4", role=ROLE_ANCHOR)))
    new_state, _ = execute(state, call, tiny_graph)
    assert new_state.clip_ids() == ("c2", "c4", "c1")


def test_replace_with_reference_clip(tiny_graph):
    state, _ = _create(tiny_graph, activity="skiing", time="2018")  # c1, c4
    call = Frame(ACT_REQUEST, REPLACE_CLIPS,
                 refs=(_target("c1"),
                       _target("c4", role=ROLE_REFERENCE)))
    new_state, result = execute(state, call, tiny_graph)
    # replacement query is c4's activity+attributes; no other clip carries
    # snowy+sunset, so brute force says no replacement is available
    brute = [c for c in tiny_graph.clips
             if c.id not in ("c1", "c4") and c.activity == "skiing"
             and {"snowy", "sunset"} <= set(c.attributes)]
    if brute:
        assert result.status == STATUS_OK
        assert new_state.clip_ids()[0] == brute[0].id
    else:
        assert result.status == STATUS_NO_RESULTS
        assert new_state.clip_ids() == state.clip_ids()


def test_replace_inserts_at_removed_position(tiny_graph):
    state, _ = _create(tiny_graph, activity="skiing")  # c1, c2, c4
    call = Frame(ACT_REQUEST, REPLACE_CLIPS,
                 slots={"activity": "surfing", "time": "2018"},
                 refs=(_target("c2"),))
    new_state, result = execute(state, call, tiny_graph)
    assert result.status == STATUS_OK
    assert new_state.clip_ids() == ("c1", "c3", "c4")


def test_refine_merges_and_overrides(tiny_graph):
    state, _ = _create(tiny_graph, activity="skiing", time="2018")
    call = Frame(ACT_REQUEST, REFINE_SEARCH, slots={"time": "2017"})
    new_state, result = execute(state, call, tiny_graph)
    assert result.status == STATUS_OK
    assert new_state.clip_ids() == ("c2",)
    assert new_state.last_search == {"activity": ("skiing",),
                                     "time": ("2017",)}


def test_modify_duration_absolute_and_relative(tiny_graph):
    state, _ = _create(tiny_graph, activity="skiing", time="2018")
    call = Frame(ACT_REQUEST, MODIFY_DURATION, slots={"duration_s": 40},
                 refs=(_target("c1"),))
    state, _ = execute(state, call, tiny_graph)
    assert state.entries[0].effective_duration_s == 40
    call = Frame(ACT_REQUEST, MODIFY_DURATION,
                 slots={"duration_change": "shorter"}, refs=(_target("c1"),))
    state, _ = execute(state, call, tiny_graph)
    assert state.entries[0].effective_duration_s == 30  # -25%


def test_modify_duration_floor_one_second(tiny_graph):
    state, _ = _create(tiny_graph, activity="skiing", time="2018")
    call = Frame(ACT_REQUEST, MODIFY_DURATION, slots={"duration_s": 1},
                 refs=(_target("c1"),))
    state, _ = execute(state, call, tiny_graph)
    for _ in range(10):
        call = Frame(ACT_REQUEST, MODIFY_DURATION,
                     slots={"duration_change": "shorter"},
                     refs=(_target("c1"),))
        state, _ = execute(state, call, tiny_graph)
    assert state.entries[0].effective_duration_s >= 1


def test_share_story(tiny_graph):
    state, _ = _create(tiny_graph, activity="skiing", time="2018")
    call = Frame(ACT_REQUEST, SHARE_STORY, slots={"share_to": "family"})
    state, result = execute(state, call, tiny_graph)
    assert result.status == STATUS_OK
    assert state.shared is True


def test_execute_is_pure(tiny_graph):
    state, _ = _create(tiny_graph, activity="skiing")
    call = Frame(ACT_REQUEST, REORDER_CLIPS, slots={"position": "last"},
                 refs=(_target("c1"),))
    first = execute(state, call, tiny_graph)
    second = execute(state, call, tiny_graph)
    assert first == second


def test_applicable_activities():
    assert applicable_activities(StoryState()) == {CREATE_STORY}
    one = StoryState(entries=(StoryEntry("c1", 5),), viewer_index=0,
                     last_search={"activity": ("skiing",)})
    acts = applicable_activities(one)
    assert REORDER_CLIPS not in acts
    assert {REMOVE_CLIPS, REFINE_SEARCH, ADD_CLIPS, REPLACE_CLIPS,
            MODIFY_DURATION, SHARE_STORY} <= acts
    five = StoryState(
        entries=tuple(StoryEntry(f"c{i}", 5) for i in range(1, 6)),
        viewer_index=0)
    assert {ADD_CLIPS, REMOVE_CLIPS, REPLACE_CLIPS, REORDER_CLIPS,
            MODIFY_DURATION, SHARE_STORY} <= applicable_activities(five)


def test_validate_api_call_schemas():
    with pytest.raises(ValidationError):
        validate_api_call(Frame(ACT_REQUEST, CREATE_STORY))
    with pytest.raises(ValidationError):
        validate_api_call(Frame(ACT_REQUEST, REMOVE_CLIPS))
    with pytest.raises(ValidationError):
        validate_api_call(Frame(ACT_REQUEST, REORDER_CLIPS,
                                refs=(_target("c1"),)))
    with pytest.raises(ValidationError):
        validate_api_call(Frame(ACT_REQUEST, MODIFY_DURATION,
                                slots={"duration_s": 5,
                                       "duration_change": "longer"},
                                refs=(_target("c1"),)))
    with pytest.raises(ValidationError):
        validate_api_call(Frame(ACT_INFORM, SHARE_STORY,
                                slots={"share_to": "family"}))


def test_assistant_frame_shapes(tiny_graph):
    state, result = _create(tiny_graph, activity="skiing")
    frame = assistant_frame(result, Frame(ACT_REQUEST, CREATE_STORY,
                                          slots={"activity": "skiing"}))
    assert frame.act == ACT_INFORM
    assert frame.activity == CREATE_STORY
    assert frame.slots["status"] == "ok"
    assert frame.slots["count"] == 3
    assert frame.refs == ()
    _, missed = _create(tiny_graph, activity="skiing", time="2014")
    frame = assistant_frame(missed, Frame(ACT_REQUEST, CREATE_STORY,
                                          slots={"activity": "skiing",
                                                 "time": "2014"}))
    assert frame.slots == {"status": "no_results"}


def test_replay_helper(tiny_graph):
    calls = [
        Frame(ACT_REQUEST, CREATE_STORY, slots={"activity": "skiing"}),
        Frame(ACT_REQUEST, REMOVE_CLIPS, refs=(_target("c2"),)),
        Frame(ACT_REQUEST, SHARE_STORY, slots={"share_to": "friends"}),
    ]
    outputs = replay(calls, tiny_graph)
    final_state, final_result = outputs[-1]
    assert final_result.status == STATUS_OK
    assert final_state.shared is True
    assert final_state.clip_ids() == ("c1", "c4")
