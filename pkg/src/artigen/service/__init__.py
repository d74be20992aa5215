from .app import create_app
from .schemas import (
    SCHEMA_MODELS,
    EvaluateRequest,
    EvaluateResponse,
    GenerateRequest,
    GenerateResponse,
    GraphModel,
    GraphNodeModel,
    HealthResponse,
    PinModel,
    PredictGraphRequest,
    PredictGraphResponse,
    RetrieveRequest,
    RetrieveResponse,
)
from .state import ServiceConfig, ServiceState, config_from_env, load_library

__all__ = [
    "SCHEMA_MODELS",
    "EvaluateRequest",
    "EvaluateResponse",
    "GenerateRequest",
    "GenerateResponse",
    "GraphModel",
    "GraphNodeModel",
    "HealthResponse",
    "PinModel",
    "PredictGraphRequest",
    "PredictGraphResponse",
    "RetrieveRequest",
    "RetrieveResponse",
    "ServiceConfig",
    "ServiceState",
    "config_from_env",
    "create_app",
    "load_library",
]
