"""Training losses: noise-residual MSE and the foreground attention loss.

The foreground loss pushes every real part's cross-attention mass onto the
object's foreground patches. Per part per layer the contribution is

    1 - sum(A * M) + sum(A * (1 - M))

which is 0 when all mass is on foreground, 2 when all on background, and 1
for uniform attention against a half-covering mask. Contributions are
summed over parts and averaged over layers.
"""
from __future__ import annotations

import numpy as np
import torch

from ..conditioning import ForegroundMask
from .model import AttentionRecord


def foreground_loss_torch(attn: torch.Tensor, fg: torch.Tensor,
                          part_real: torch.Tensor) -> torch.Tensor:
    """Differentiable batch loss.

    attn (L,B,32,256) with zero rows for padded parts; fg (B,256) float in
    {0,1}; part_real (B,32) bool. Returns per-sample losses (B,).
    """
    on_fg = (attn * fg[None, :, None, :]).sum(dim=-1)
    off_fg = (attn * (1.0 - fg[None, :, None, :])).sum(dim=-1)
    per_part = 1.0 - on_fg + off_fg  # (L,B,32)
    per_part = per_part * part_real[None].float()
    return per_part.sum(dim=-1).mean(dim=0)


def foreground_loss(attn: AttentionRecord, fg: ForegroundMask) -> float:
    """Loss of a single recorded attention stack (layers averaged)."""
    weights = torch.from_numpy(np.array(attn.weights))[:, None]
    mask = torch.from_numpy(attn.padding_mask.astype(bool))[None]
    fg_t = torch.from_numpy(fg.values.astype(np.float64))[None]
    return float(foreground_loss_torch(weights, fg_t, mask)[0])


def noise_loss(eps_hat: torch.Tensor, eps: torch.Tensor,
               part_real: torch.Tensor) -> torch.Tensor:
    """MSE over entries of real parts only; scalar."""
    mask = part_real[:, :, None, None].float()
    diff = (eps_hat - eps) ** 2 * mask
    denom = mask.sum() * eps.shape[2] * eps.shape[3]
    return diff.sum() / denom
