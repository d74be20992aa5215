"""Service configuration and immutable runtime snapshots."""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from ..diffusion import load_checkpoint, make_schedule
from ..env import ENV_CHECKPOINT, ENV_LIBRARY, ENV_VLM_ENDPOINT, ENV_VLM_MODEL
from ..graphs import VlmConfig
from ..retrieval import load_library


@dataclass
class ServiceConfig:
    """Startup wiring: model checkpoint, retrieval library, workspace paths.

    ``data_root`` anchors file references in request payloads; traversal
    outside it is rejected. ``vlm_transport`` injects an httpx transport for
    tests.
    """

    checkpoint: Optional[Path] = None
    library: Optional[Path] = None
    library_name: Optional[str] = None
    data_root: Optional[Path] = None
    assets_dir: Optional[Path] = None
    timesteps: int = 1000
    report_csv: Optional[Path] = None
    vlm: Optional[VlmConfig] = None
    vlm_transport: Any = None
    vlm_backoff: float = 0.25


def config_from_env(**overrides) -> ServiceConfig:
    cfg = ServiceConfig(**overrides)
    if cfg.checkpoint is None and os.environ.get(ENV_CHECKPOINT):
        cfg.checkpoint = Path(os.environ[ENV_CHECKPOINT])
    if cfg.library is None and os.environ.get(ENV_LIBRARY):
        cfg.library = Path(os.environ[ENV_LIBRARY])
    if cfg.vlm is None and os.environ.get(ENV_VLM_ENDPOINT):
        cfg.vlm = VlmConfig(
            endpoint=os.environ[ENV_VLM_ENDPOINT],
            model=os.environ.get(ENV_VLM_MODEL, "gpt-4o"))
    return cfg


def stable_asset_id(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True,
                      separators=(",", ":")).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class ServiceState:
    """Loaded artifacts; attributes are replaced, never mutated in place."""

    cfg: ServiceConfig
    model: Any = None
    checkpoint_name: Optional[str] = None
    schedule: Any = None
    libraries: dict = field(default_factory=dict)
    assets_dir: Path = None
    assets: dict = field(default_factory=dict)

    def __init__(self, cfg: ServiceConfig):
        self.cfg = cfg
        self.schedule = make_schedule(cfg.timesteps)
        self.model = None
        self.checkpoint_name = None
        if cfg.checkpoint is not None:
            self.model = load_checkpoint(cfg.checkpoint)
            self.checkpoint_name = Path(cfg.checkpoint).stem
        self.libraries = {}
        if cfg.library is not None:
            name = cfg.library_name or Path(cfg.library).stem
            self.libraries[name] = load_library(cfg.library)
        self.assets_dir = Path(cfg.assets_dir) if cfg.assets_dir else Path(
            tempfile.mkdtemp(prefix="artigen-assets-"))
        self.assets_dir.mkdir(parents=True, exist_ok=True)
        self.assets = {}

    @property
    def library_name(self) -> Optional[str]:
        return next(iter(self.libraries), None)

    def resolve_ref(self, ref: str) -> Path:
        """A payload file reference, confined to the data root."""
        root = Path(self.cfg.data_root or ".").resolve()
        path = (root / ref).resolve()
        if root not in (path, *path.parents):
            raise PermissionError(f"reference {ref!r} escapes the data root")
        return path

    def register_asset(self, asset_id: str) -> Path:
        path = self.assets_dir / asset_id
        path.mkdir(parents=True, exist_ok=True)
        self.assets[asset_id] = path
        return path
