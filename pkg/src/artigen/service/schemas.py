"""Request/response bodies for the HTTP service.

Every model here is published as a JSON-schema file under ``schemas/service``
at the repository root; a test keeps the files in sync with these classes.
"""
from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

from ..data.encoding import N_ATTRS, N_DIMS


class GraphNodeModel(BaseModel):
    """One connectivity-tree node; ``parent`` is null for the root."""

    id: int = Field(ge=0)
    label: str
    parent: Optional[int] = None


class GraphModel(BaseModel):
    nodes: list[GraphNodeModel]


class PinModel(BaseModel):
    """Clamp one attribute row of one part during reverse diffusion."""

    part_id: int = Field(ge=0)
    row: int = Field(ge=0, lt=N_ATTRS)
    values: list[float] = Field(min_length=N_DIMS, max_length=N_DIMS)


class GenerateRequest(BaseModel):
    graph: Optional[GraphModel] = None
    feature_file: Optional[str] = None
    category: Optional[str] = None
    omega: float = 0.0
    num_samples: int = Field(default=1, ge=1)
    seed: int = 0
    pins: list[PinModel] = Field(default_factory=list)
    assemble: bool = False
    library: Optional[str] = None


class GenerateResponse(BaseModel):
    objects: list[dict]
    seeds: list[int]
    export_ids: Optional[list[str]] = None


class PredictGraphRequest(BaseModel):
    predictor: Literal["stub", "vlm"]
    feature_file: Optional[str] = None
    image_ref: Optional[str] = None


class PredictGraphResponse(BaseModel):
    graph: GraphModel
    source: str
    raw_response: Optional[str] = None


class EvaluateRequest(BaseModel):
    gen: str
    gt: str
    k_states: int = Field(default=5, ge=2)
    n_points: int = Field(default=2048, ge=8)
    seed: int = 0
    scale_normalize: bool = True


class EvaluateResponse(BaseModel):
    gen: str
    gt: str
    rs_giou: float
    as_giou: float
    rs_cdist: float
    as_cdist: float
    rs_cd: Optional[float] = None
    as_cd: Optional[float] = None
    aor: float
    graph_acc: int
    k_states: int
    n_points: int


class RetrieveRequest(BaseModel):
    abstraction: dict
    library: str = "default"
    k_states: int = Field(default=5, ge=2)
    name: str = "object"


class ProvenanceModel(BaseModel):
    part_id: int
    label: str
    source_object: str
    source_part: Optional[int] = None


class RetrieveResponse(BaseModel):
    asset_id: str
    candidate_id: str
    files: list[str]
    provenance: list[ProvenanceModel]


class HealthResponse(BaseModel):
    status: str
    checkpoint: Optional[str] = None
    library: Optional[str] = None


SCHEMA_MODELS = {
    "graph_node": GraphNodeModel,
    "graph": GraphModel,
    "pin": PinModel,
    "generate_request": GenerateRequest,
    "generate_response": GenerateResponse,
    "predict_graph_request": PredictGraphRequest,
    "predict_graph_response": PredictGraphResponse,
    "evaluate_request": EvaluateRequest,
    "evaluate_response": EvaluateResponse,
    "retrieve_request": RetrieveRequest,
    "retrieve_response": RetrieveResponse,
    "health_response": HealthResponse,
}
