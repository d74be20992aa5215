"""Forward-process noise schedule for the attribute-token diffusion model.

Linear beta interpolation over T steps (defaults 1e-4 -> 0.02 over 1000),
with alpha-bar as the cumulative product. Timesteps are 1-based: t = 1 is
the least-noised step, t = T the most.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..data.encoding import AttributeTensor
from ..errors import BadBetas, ShapeMismatch

DEFAULT_STEPS = 1000
DEFAULT_BETA_1 = 1e-4
DEFAULT_BETA_T = 0.02


@dataclass(frozen=True)
class NoiseSchedule:
    """Per-step betas with derived alphas and cumulative alpha-bars."""

    betas: np.ndarray
    alphas: np.ndarray
    alpha_bars: np.ndarray

    def __init__(self, betas):
        betas = np.asarray(betas, dtype=float)
        alphas = 1.0 - betas
        alpha_bars = np.cumprod(alphas)
        for arr in (betas, alphas, alpha_bars):
            arr.setflags(write=False)
        object.__setattr__(self, "betas", betas)
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "alpha_bars", alpha_bars)

    @property
    def T(self) -> int:
        return len(self.betas)

    def alpha_bar(self, t: int) -> float:
        """Cumulative product at 1-based step t; alpha_bar(0) = 1."""
        if not 0 <= t <= self.T:
            raise ValueError(f"t = {t} outside [0, {self.T}]")
        return 1.0 if t == 0 else float(self.alpha_bars[t - 1])


def make_schedule(T: int = DEFAULT_STEPS, beta_1: float = DEFAULT_BETA_1,
                  beta_T: float = DEFAULT_BETA_T) -> NoiseSchedule:
    if T < 1:
        raise BadBetas(f"T = {T} must be >= 1")
    if not (0.0 < beta_1 <= beta_T < 1.0):
        raise BadBetas(f"betas must satisfy 0 < {beta_1} <= {beta_T} < 1")
    return NoiseSchedule(np.linspace(beta_1, beta_T, T))


def add_noise(x0: AttributeTensor, t: int, eps: np.ndarray,
              schedule: NoiseSchedule) -> AttributeTensor:
    """x_t = sqrt(abar_t) x0 + sqrt(1 - abar_t) eps on real rows only."""
    if not 1 <= t <= schedule.T:
        raise ValueError(f"t = {t} outside [1, {schedule.T}]")
    eps = np.asarray(eps, dtype=float)
    if eps.shape != x0.data.shape:
        raise ShapeMismatch(
            f"noise shape {eps.shape} != data shape {x0.data.shape}")
    abar = schedule.alpha_bar(t)
    noised = np.sqrt(abar) * x0.data + np.sqrt(1.0 - abar) * eps
    noised[~x0.padding_mask] = 0.0
    return AttributeTensor(noised, x0.padding_mask)
