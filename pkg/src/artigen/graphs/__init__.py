"""Connectivity-graph prediction and topology scoring."""
from .predict import (
    GraphPrediction,
    PredictionSource,
    VlmConfig,
    predict_ground_truth,
    predict_stub,
    predict_vlm,
    predict_vlm_batch,
)
from .prompting import (
    PromptExample,
    build_prompt,
    default_response_schema,
    load_example_set,
    load_synonyms,
    parse_response,
)
from .topology import canonical_form, graph_topology_accuracy

__all__ = [
    "GraphPrediction",
    "PredictionSource",
    "VlmConfig",
    "predict_ground_truth",
    "predict_stub",
    "predict_vlm",
    "predict_vlm_batch",
    "PromptExample",
    "build_prompt",
    "default_response_schema",
    "load_example_set",
    "load_synonyms",
    "parse_response",
    "canonical_form",
    "graph_topology_accuracy",
]
