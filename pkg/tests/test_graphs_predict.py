"""Prompt assembly, response parsing, VLM client, and the stub predictor."""
import json

import httpx
import numpy as np
import pytest

from artigen.conditioning import CameraSpec, PatchFeatureGrid, synthetic_features
from artigen.core import (
    Aabb,
    ArticulatedAbstraction,
    Joint,
    PartAbstraction,
    SemanticLabel,
)
from artigen.errors import (
    AuthFailed,
    NoExamples,
    NoParseableBlock,
    NotSyntheticLayout,
    RetriesExhausted,
    UnknownLabel,
    Unreachable,
    ValidationError,
)
from artigen.graphs import (
    PredictionSource,
    PromptExample,
    VlmConfig,
    build_prompt,
    default_response_schema,
    graph_topology_accuracy,
    load_example_set,
    parse_response,
    predict_ground_truth,
    predict_stub,
    predict_vlm,
    predict_vlm_batch,
)

HEAD_ON = CameraSpec(azimuth=0.0, elevation=0.0)
EXAMPLE = PromptExample("A cabinet with one door.",
                        "```graph\n0 base\n1 door parent 0\n```")


def boxes_object(specs):
    """Parts from (center, half, label, parent) tuples; id = index."""
    parts = [
        PartAbstraction(i, label, Aabb.from_center_halfextent(c, h),
                        Joint.fixed(), parent=parent)
        for i, (c, h, label, parent) in enumerate(specs)
    ]
    return ArticulatedAbstraction.from_parts(parts)


# --- prompt assembly --------------------------------------------------------


def test_build_prompt_message_counts():
    one = build_prompt("http://img/1.png", [EXAMPLE])
    assert len(one) == 4
    three = build_prompt("http://img/1.png", [EXAMPLE] * 3)
    assert len(three) == 8
    assert [m["role"] for m in three] == [
        "system", "user", "assistant", "user", "assistant", "user",
        "assistant", "user"]


def test_build_prompt_query_carries_image_ref():
    messages = build_prompt("data:image/png;base64,QUJD", [EXAMPLE])
    query = messages[-1]
    assert query["role"] == "user"
    parts = {p["type"]: p for p in query["content"]}
    assert parts["image_url"]["image_url"]["url"] == "data:image/png;base64,QUJD"
    assert parts["text"]["text"]


def test_build_prompt_contains_schema_verbatim():
    default = build_prompt("img", [EXAMPLE])
    assert default_response_schema() in default[0]["content"]
    custom = "```graph\nRESPOND HERE\n```"
    messages = build_prompt("img", [EXAMPLE], response_schema=custom)
    assert custom in messages[0]["content"]


def test_build_prompt_requires_examples():
    with pytest.raises(NoExamples):
        build_prompt("img", [])


def test_bundled_example_set_is_self_consistent():
    examples = load_example_set("v1")
    assert len(examples) >= 1
    for ex in examples:
        graph = parse_response(ex.response)
        assert len(graph.ids()) >= 2


# --- response parsing -------------------------------------------------------


def test_parse_two_node_block():
    graph = parse_response("```graph\n0 base; 1 door parent 0\n```")
    assert graph.ids() == [0, 1]
    assert graph.label_of(1) is SemanticLabel.DOOR
    assert graph.parent_of == {1: 0}


def test_parse_newline_statements_and_case():
    graph = parse_response("```\n0 Base\n1 DOOR parent 0\n2 handle parent 1\n```")
    assert graph.ids() == [0, 1, 2]
    assert graph.label_of(2) is SemanticLabel.HANDLE


def test_parse_last_fenced_block_wins():
    text = ("Step 1: ```graph\n0 base\n``` was a draft.\n"
            "Final: ```graph\n0 base\n1 drawer parent 0\n```")
    assert parse_response(text).ids() == [0, 1]


def test_parse_bare_statements_without_fence():
    assert parse_response("0 base; 1 tray parent 0").ids() == [0, 1]


def test_parse_cycle_is_validation_error():
    with pytest.raises(ValidationError):
        parse_response("```graph\n0 base\n1 door parent 2\n2 drawer parent 1\n```")


def test_parse_root_must_be_base():
    with pytest.raises(ValidationError):
        parse_response("```graph\n0 door\n1 base parent 0\n```")


def test_parse_duplicate_id_rejected():
    with pytest.raises(ValidationError):
        parse_response("```graph\n0 base\n1 door parent 0\n1 drawer parent 0\n```")


def test_parse_synonym_lookup():
    graph = parse_response("```graph\n0 base\n1 lid parent 0\n```")
    assert graph.label_of(1) is SemanticLabel.DOOR
    custom = parse_response("```graph\n0 base\n1 wing parent 0\n```",
                            synonyms={"wing": "door"})
    assert custom.label_of(1) is SemanticLabel.DOOR


def test_parse_unknown_label():
    with pytest.raises(UnknownLabel):
        parse_response("```graph\n0 base\n1 propeller parent 0\n```")


def test_parse_no_block():
    with pytest.raises(NoParseableBlock):
        parse_response("I see a cabinet with a door but cannot comply.")
    with pytest.raises(NoParseableBlock):
        parse_response("")


# --- VLM client --------------------------------------------------------------


VALID_REPLY = "Parts found.\n```graph\n0 base\n1 door parent 0\n2 handle parent 1\n```"


def chat_response(content, status=200):
    if status != 200:
        return httpx.Response(status, json={"error": "denied"})
    return httpx.Response(200, json={
        "choices": [{"message": {"role": "assistant", "content": content}}]})


def make_cfg(**overrides):
    defaults = dict(endpoint="https://llm.test/v1/chat/completions",
                    model="test-model", max_retries=2)
    defaults.update(overrides)
    return VlmConfig(**defaults)


@pytest.fixture()
def api_key(monkeypatch):
    monkeypatch.setenv("ARTIGEN_VLM_KEY", "sekret")


def test_vlm_config_invariants():
    with pytest.raises(ValueError):
        make_cfg(max_retries=-1)
    with pytest.raises(ValueError):
        make_cfg(timeout=0.0)
    with pytest.raises(ValueError):
        make_cfg(max_concurrency=0)


def test_predict_vlm_success_and_request_shape(api_key):
    captured = {}

    def handler(request):
        captured["body"] = json.loads(request.read())
        captured["auth"] = request.headers.get("authorization")
        return chat_response(VALID_REPLY)

    pred = predict_vlm("http://img/q.png", make_cfg(temperature=0.7),
                       examples=[EXAMPLE],
                       transport=httpx.MockTransport(handler), backoff=0.0)
    assert pred.source is PredictionSource.VLM
    assert pred.raw_response == VALID_REPLY
    assert pred.graph.ids() == [0, 1, 2]
    assert captured["auth"] == "Bearer sekret"
    assert captured["body"]["model"] == "test-model"
    assert captured["body"]["temperature"] == 0.7
    assert len(captured["body"]["messages"]) == 4


def test_predict_vlm_retries_on_garbage_then_succeeds(api_key):
    replies = iter(["no graph here", "still nothing", VALID_REPLY])
    calls = []

    def handler(request):
        calls.append(1)
        return chat_response(next(replies))

    pred = predict_vlm("img", make_cfg(), examples=[EXAMPLE],
                       transport=httpx.MockTransport(handler), backoff=0.0)
    assert len(calls) == 3
    assert pred.graph.ids() == [0, 1, 2]


def test_predict_vlm_retries_exhausted(api_key):
    calls = []

    def handler(request):
        calls.append(1)
        return chat_response("garbage")

    with pytest.raises(RetriesExhausted):
        predict_vlm("img", make_cfg(max_retries=2), examples=[EXAMPLE],
                    transport=httpx.MockTransport(handler), backoff=0.0)
    assert len(calls) == 3


def test_predict_vlm_auth_rejection_never_retries(api_key):
    calls = []

    def handler(request):
        calls.append(1)
        return chat_response(None, status=401)

    with pytest.raises(AuthFailed):
        predict_vlm("img", make_cfg(), examples=[EXAMPLE],
                    transport=httpx.MockTransport(handler), backoff=0.0)
    assert len(calls) == 1


def test_predict_vlm_missing_key(monkeypatch):
    monkeypatch.delenv("ARTIGEN_VLM_KEY", raising=False)

    def handler(request):  # pragma: no cover - must never be reached
        raise AssertionError("request sent without credentials")

    with pytest.raises(AuthFailed):
        predict_vlm("img", make_cfg(), examples=[EXAMPLE],
                    transport=httpx.MockTransport(handler))


def test_predict_vlm_unreachable(api_key):
    def handler(request):
        raise httpx.ConnectError("no route to host")

    with pytest.raises(Unreachable):
        predict_vlm("img", make_cfg(max_retries=1), examples=[EXAMPLE],
                    transport=httpx.MockTransport(handler), backoff=0.0)


def test_predict_vlm_server_error_then_success(api_key):
    replies = iter([500, 200])
    calls = []

    def handler(request):
        calls.append(1)
        status = next(replies)
        return chat_response(VALID_REPLY if status == 200 else None, status)

    pred = predict_vlm("img", make_cfg(), examples=[EXAMPLE],
                       transport=httpx.MockTransport(handler), backoff=0.0)
    assert len(calls) == 2
    assert pred.source is PredictionSource.VLM


def test_predict_vlm_batch_preserves_order(api_key):
    def handler(request):
        body = json.loads(request.read())
        ref = body["messages"][-1]["content"][1]["image_url"]["url"]
        return chat_response(f"image {ref}\n```graph\n0 base\n```")

    refs = [f"http://img/{i}.png" for i in range(5)]
    preds = predict_vlm_batch(refs, make_cfg(max_concurrency=3),
                              examples=[EXAMPLE],
                              transport=httpx.MockTransport(handler),
                              backoff=0.0)
    assert [p.raw_response.split()[1] for p in preds] == refs


# --- ground truth and stub ----------------------------------------------------


def test_predict_ground_truth_passthrough():
    obj = boxes_object([
        ((0, 0, 0), (0.8, 0.8, 0.8), SemanticLabel.BASE, None),
        ((0.82, 0, 0), (0.02, 0.78, 0.78), SemanticLabel.DOOR, 0),
    ])
    pred = predict_ground_truth(obj)
    assert pred.source is PredictionSource.GROUND_TRUTH
    assert pred.graph is obj.graph


def test_stub_rejects_real_feature_layout():
    grid = PatchFeatureGrid(np.zeros((256, 768), dtype=np.float32))
    with pytest.raises(NotSyntheticLayout):
        predict_stub(grid)


def test_stub_single_base_object():
    obj = boxes_object([((0, 0, 0), (0.8, 0.8, 0.8), SemanticLabel.BASE, None)])
    grid, _ = synthetic_features(obj, HEAD_ON)
    pred = predict_stub(grid)
    assert pred.source is PredictionSource.STUB
    assert pred.graph.ids() == [0]
    assert pred.graph.label_of(0) is SemanticLabel.BASE


def test_stub_recovers_base_door_handle_chain():
    obj = boxes_object([
        ((0, 0, 0), (0.8, 0.8, 0.8), SemanticLabel.BASE, None),
        ((0.82, 0, 0), (0.02, 0.78, 0.78), SemanticLabel.DOOR, 0),
        ((0.86, -0.6, 0), (0.02, 0.04, 0.3), SemanticLabel.HANDLE, 1),
    ])
    grid, _ = synthetic_features(obj, HEAD_ON)
    pred = predict_stub(grid)
    assert len(pred.graph.ids()) == 3
    assert graph_topology_accuracy(pred.graph, obj.graph) == 1
    handle = [i for i in pred.graph.ids()
              if pred.graph.label_of(i) is SemanticLabel.HANDLE][0]
    assert pred.graph.label_of(pred.graph.parent_of[handle]) is SemanticLabel.DOOR


def test_stub_attaches_knobs_to_nearest_drawer():
    obj = boxes_object([
        ((0, 0, 0), (0.9, 0.9, 0.45), SemanticLabel.BASE, None),
        ((0.5, -0.55, 0), (0.3, 0.25, 0.25), SemanticLabel.DRAWER, 0),
        ((0.82, -0.55, 0), (0.03, 0.05, 0.05), SemanticLabel.KNOB, 1),
        ((0.5, 0.55, 0), (0.3, 0.25, 0.25), SemanticLabel.DRAWER, 0),
        ((0.82, 0.55, 0), (0.03, 0.05, 0.05), SemanticLabel.KNOB, 3),
    ])
    grid, _ = synthetic_features(obj, HEAD_ON)
    pred = predict_stub(grid)
    assert len(pred.graph.ids()) == 5
    assert graph_topology_accuracy(pred.graph, obj.graph) == 1


def test_stub_deterministic():
    obj = boxes_object([
        ((0, 0, 0), (0.8, 0.8, 0.8), SemanticLabel.BASE, None),
        ((0.82, 0, 0), (0.02, 0.78, 0.78), SemanticLabel.DOOR, 0),
    ])
    grid, _ = synthetic_features(obj, HEAD_ON)
    a, b = predict_stub(grid), predict_stub(grid)
    assert a.graph.nodes == b.graph.nodes
    assert a.graph.parent_of == b.graph.parent_of
