"""Graph predictors: ground-truth passthrough, heuristic stub, VLM client.

The VLM client speaks the OpenAI-compatible chat-completions wire format
and retries with exponential backoff, re-asking when a reply fails to
parse. The stub reconstructs a graph from synthetic feature grids alone so
the full pipeline can run hermetically.
"""
from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import httpx
import numpy as np
from scipy import ndimage

from ..conditioning import GRID_SIDE, SYNTHETIC_DF, PatchFeatureGrid
from ..core import SEMANTIC_LABELS, ArticulatedAbstraction, ConnectivityGraph, SemanticLabel
from ..core.graph import validate_graph
from ..errors import (
    AuthFailed,
    NoParseableBlock,
    NotSyntheticLayout,
    RetriesExhausted,
    UnknownLabel,
    Unreachable,
    ValidationError,
)
from .prompting import build_prompt, load_example_set, load_synonyms, parse_response


class PredictionSource(Enum):
    GROUND_TRUTH = "ground_truth"
    STUB = "stub"
    VLM = "vlm"


@dataclass(frozen=True)
class GraphPrediction:
    """A validated connectivity graph plus where it came from."""

    graph: ConnectivityGraph
    raw_response: str
    source: PredictionSource

    def __post_init__(self):
        validate_graph(self.graph)


@dataclass(frozen=True)
class VlmConfig:
    """Chat-endpoint settings; the API key comes from ``api_key_env``."""

    endpoint: str
    model: str
    api_key_env: str = "ARTIGEN_VLM_KEY"
    temperature: float = 0.2
    max_retries: int = 2
    timeout: float = 30.0
    example_set: str = "v1"
    max_concurrency: int = 4

    def __post_init__(self):
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.timeout <= 0:
            raise ValueError("timeout must be > 0")
        if self.max_concurrency < 1:
            raise ValueError("max_concurrency must be >= 1")


def predict_ground_truth(obj: ArticulatedAbstraction) -> GraphPrediction:
    return GraphPrediction(obj.graph, "", PredictionSource.GROUND_TRUTH)


def predict_vlm(image_ref: str, cfg: VlmConfig, examples=None,
                transport: httpx.BaseTransport | None = None,
                backoff: float = 0.25) -> GraphPrediction:
    """Ask the endpoint for a graph, retrying transport and parse failures.

    Attempts are capped at ``max_retries + 1``; each request is bounded by
    ``cfg.timeout``. Auth rejections never retry. ``transport`` is
    injectable for tests (e.g. ``httpx.MockTransport``).
    """
    if examples is None:
        examples = load_example_set(cfg.example_set)
    synonyms = load_synonyms()
    body = {
        "model": cfg.model,
        "messages": build_prompt(image_ref, examples),
        "temperature": cfg.temperature,
    }
    key = os.environ.get(cfg.api_key_env)
    if not key:
        raise AuthFailed(f"environment variable {cfg.api_key_env} is not set")
    headers = {"Authorization": f"Bearer {key}"}

    last_parse_error: Exception | None = None
    last_transport_error: Exception | None = None
    with httpx.Client(transport=transport, timeout=cfg.timeout) as client:
        for attempt in range(cfg.max_retries + 1):
            if attempt and backoff > 0:
                time.sleep(backoff * 2 ** (attempt - 1))
            try:
                resp = client.post(cfg.endpoint, json=body, headers=headers)
            except httpx.TransportError as e:
                last_transport_error = e
                continue
            if resp.status_code in (401, 403):
                raise AuthFailed(f"endpoint rejected credentials "
                                 f"({resp.status_code})")
            if resp.status_code != 200:
                last_transport_error = httpx.HTTPStatusError(
                    f"status {resp.status_code}", request=resp.request,
                    response=resp)
                continue
            try:
                text = resp.json()["choices"][0]["message"]["content"]
                graph = parse_response(text, synonyms)
            except (NoParseableBlock, UnknownLabel, ValidationError,
                    KeyError, IndexError, TypeError, ValueError) as e:
                last_parse_error = e
                continue
            return GraphPrediction(graph, text, PredictionSource.VLM)

    if last_parse_error is not None:
        raise RetriesExhausted(
            f"no parseable graph in {cfg.max_retries + 1} attempts"
        ) from last_parse_error
    raise Unreachable(f"endpoint {cfg.endpoint} unreachable") \
        from last_transport_error


def predict_vlm_batch(image_refs, cfg: VlmConfig, examples=None,
                      transport: httpx.BaseTransport | None = None,
                      backoff: float = 0.25) -> list:
    """Concurrent predictions, order-preserving, bounded by the config."""
    refs = list(image_refs)
    with ThreadPoolExecutor(max_workers=cfg.max_concurrency) as pool:
        futures = [pool.submit(predict_vlm, r, cfg, examples, transport,
                               backoff) for r in refs]
        return [f.result() for f in futures]


def _components(mask: np.ndarray) -> list:
    """Patch-coordinate arrays of 4-connected regions, one per component."""
    labeled, count = ndimage.label(mask)
    return [np.argwhere(labeled == c) for c in range(1, count + 1)]


def predict_stub(grid: PatchFeatureGrid) -> GraphPrediction:
    """Deterministic graph reconstruction from a synthetic feature grid.

    Per-label coverage slots are segmented into connected patch regions:
    each non-base region becomes a part. All base coverage merges into the
    single root. Doors, drawers, and trays attach to the base; handles and
    knobs attach to the door/drawer region with the nearest centroid.
    """
    if grid.d_f != SYNTHETIC_DF:
        raise NotSyntheticLayout(
            f"stub requires the {SYNTHETIC_DF}-dim synthetic layout, "
            f"got d_f = {grid.d_f}")
    coverage = np.asarray(grid.features[:, 2:2 + len(SEMANTIC_LABELS)])
    coverage = coverage.reshape(GRID_SIDE, GRID_SIDE, len(SEMANTIC_LABELS))

    regions = []  # (label, patch coords) excluding base, deterministic order
    for li, label in enumerate(SEMANTIC_LABELS):
        if label is SemanticLabel.BASE:
            continue
        for coords in _components(coverage[:, :, li] > 0.0):
            anchor = int(coords[:, 0].min()) * GRID_SIDE + int(coords[:, 1].min())
            regions.append((label, coords, anchor))
    regions.sort(key=lambda r: (SEMANTIC_LABELS.index(r[0]), r[2]))

    nodes = [(0, SemanticLabel.BASE)]
    parent_of = {}
    centroids = {}
    for i, (label, coords, _) in enumerate(regions, start=1):
        nodes.append((i, label))
        centroids[i] = coords.mean(axis=0)
    anchors = [i for i, (label, _, _) in enumerate(regions, start=1)
               if label in (SemanticLabel.DOOR, SemanticLabel.DRAWER)]
    for i, (label, _, _) in enumerate(regions, start=1):
        if label in (SemanticLabel.HANDLE, SemanticLabel.KNOB) and anchors:
            parent_of[i] = min(
                anchors,
                key=lambda a: (float(np.linalg.norm(centroids[i] - centroids[a])), a))
        else:
            parent_of[i] = 0
    graph = ConnectivityGraph(nodes, parent_of)
    return GraphPrediction(graph, "", PredictionSource.STUB)
