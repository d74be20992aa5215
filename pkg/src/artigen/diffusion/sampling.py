"""Ancestral reverse-diffusion sampling with classifier-free guidance.

Guidance combines an image-conditioned and an image-dropped prediction:
eps = (1 + omega) * eps(x_t; I, G) - omega * eps(x_t; empty, G); the graph
is retained on both branches. Pinned attribute rows are re-clamped after
every reverse step to their forward-noised values, so the final tensor
carries the pinned values exactly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import MAX_PARTS
from ..data.encoding import AttributeTensor, N_ATTRS, N_DIMS
from ..errors import MissingGraph, MissingImage, ShapeMismatch
from ..utils.validation import check_seed
from .model import ConditioningBundle, Denoiser, denoise_step
from .schedule import NoiseSchedule


@dataclass(frozen=True)
class SamplerConfig:
    omega: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not np.isfinite(self.omega) or self.omega < 0:
            raise ValueError(f"omega = {self.omega} must be finite and >= 0")
        check_seed(self.seed)


@dataclass(frozen=True)
class PinSet:
    """Attribute rows to hold fixed: mask (32,5) selects (part, row)."""

    mask: np.ndarray
    values: np.ndarray

    def __init__(self, mask, values):
        mask = np.asarray(mask, dtype=bool)
        values = np.asarray(values, dtype=float)
        if mask.shape != (MAX_PARTS, N_ATTRS):
            raise ShapeMismatch(f"pin mask shape {mask.shape}")
        if values.shape != (MAX_PARTS, N_ATTRS, N_DIMS):
            raise ShapeMismatch(f"pin values shape {values.shape}")
        mask = mask.copy()
        values = values.copy()
        mask.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "values", values)

    @staticmethod
    def empty() -> "PinSet":
        return PinSet(np.zeros((MAX_PARTS, N_ATTRS), dtype=bool),
                      np.zeros((MAX_PARTS, N_ATTRS, N_DIMS)))


def cfg_epsilon(model: Denoiser, x_t: AttributeTensor, t: int,
                cond: ConditioningBundle, omega: float) -> np.ndarray:
    """Guided noise estimate; requires image conditioning."""
    if cond.features is None:
        raise MissingImage("classifier-free guidance requires an image")
    eps_cond, _ = denoise_step(model, x_t, t, cond)
    if omega == 0.0:
        return eps_cond
    eps_uncond, _ = denoise_step(model, x_t, t, cond.without_image())
    return (1.0 + omega) * eps_cond - omega * eps_uncond


def _clamp_pins(x: np.ndarray, pins: PinSet, abar: float,
                rng: np.random.Generator) -> None:
    """Overwrite pinned rows with their forward-noised values in place.

    At abar = 1 (the final step) the clean values land exactly.
    """
    if not pins.mask.any():
        return
    if abar >= 1.0:
        noised = pins.values
    else:
        eps = rng.standard_normal(pins.values.shape)
        noised = np.sqrt(abar) * pins.values + np.sqrt(1.0 - abar) * eps
    x[pins.mask] = noised[pins.mask]


def sample(model: Denoiser, cond: ConditioningBundle,
           sampler_cfg: SamplerConfig, schedule: NoiseSchedule,
           pins: PinSet | None = None) -> AttributeTensor:
    """Ancestral DDPM loop from pure noise on the graph's real slots.

    The graph is mandatory: it fixes the part count and token ordering.
    Deterministic for a fixed (model, cond, seed, schedule).
    """
    if cond.graph_mask is None:
        raise MissingGraph("sampling requires a connectivity graph")
    pins = PinSet.empty() if pins is None else pins
    part_real = cond.graph_mask.padding_mask
    rng = np.random.default_rng(sampler_cfg.seed)

    x = rng.standard_normal((MAX_PARTS, N_ATTRS, N_DIMS))
    x[~part_real] = 0.0
    _clamp_pins(x, pins, schedule.alpha_bar(schedule.T), rng)
    x[~part_real] = 0.0

    for t in range(schedule.T, 0, -1):
        x_t = AttributeTensor(x, part_real)
        if cond.features is not None:
            eps = cfg_epsilon(model, x_t, t, cond, sampler_cfg.omega)
        else:
            eps, _ = denoise_step(model, x_t, t, cond)
        beta = schedule.betas[t - 1]
        alpha = schedule.alphas[t - 1]
        abar_t = schedule.alpha_bar(t)
        abar_prev = schedule.alpha_bar(t - 1)
        mean = (x - beta / np.sqrt(1.0 - abar_t) * eps) / np.sqrt(alpha)
        if t > 1:
            sigma = np.sqrt((1.0 - abar_prev) / (1.0 - abar_t) * beta)
            noise = rng.standard_normal(x.shape)
            x = mean + sigma * noise
        else:
            x = mean
        _clamp_pins(x, pins, abar_prev, rng)
        x[~part_real] = 0.0
    return AttributeTensor(x, part_real)
