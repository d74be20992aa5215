"""Versioned checkpoint container for the denoiser.

Layout (torch.save dict): {"format_version": 1, "config": DenoiserConfig
fields, "manifest": {tensor name: shape list}, "state": named weight
tensors}. The manifest makes the weight naming scheme auditable: loading
rejects any state dict whose names or shapes disagree with it.
"""
from __future__ import annotations

from dataclasses import asdict
from pathlib import Path

import torch

from ..errors import ParseError
from .model import Denoiser, DenoiserConfig

FORMAT_VERSION = 1


def tensor_manifest(model: Denoiser) -> dict:
    """Stable name -> shape mapping of every learnable tensor."""
    return {name: list(t.shape) for name, t in model.state_dict().items()}


def save_checkpoint(path, model: Denoiser) -> None:
    payload = {
        "format_version": FORMAT_VERSION,
        "config": asdict(model.cfg),
        "manifest": tensor_manifest(model),
        "state": model.state_dict(),
    }
    torch.save(payload, Path(path))


def load_checkpoint(path) -> Denoiser:
    """Rebuild a denoiser; rejects unknown versions and shape drift."""
    try:
        payload = torch.load(Path(path), map_location="cpu",
                             weights_only=False)
    except Exception as e:
        raise ParseError(f"unreadable checkpoint {path}: {e}") from e
    if not isinstance(payload, dict) or "format_version" not in payload:
        raise ParseError(f"{path}: not a checkpoint container")
    if payload["format_version"] != FORMAT_VERSION:
        raise ParseError(
            f"{path}: unsupported format version {payload['format_version']}")
    cfg = DenoiserConfig(**payload["config"])
    model = Denoiser(cfg)
    expected = tensor_manifest(model)
    manifest = payload["manifest"]
    if manifest != expected:
        missing = set(expected) ^ set(manifest)
        raise ParseError(
            f"{path}: weight manifest mismatch (differing names: "
            f"{sorted(missing) or 'shapes'})")
    model.load_state_dict(payload["state"])
    model.eval()
    return model
