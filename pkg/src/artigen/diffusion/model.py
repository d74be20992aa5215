"""Attention-block denoiser over part-attribute tokens.

Each of the 5 attribute rows of each of the 32 part slots is one token
(160 max). Every block applies, in order: adaptive layer norm fusing the
timestep (and category when present), local attention within each part's 5
tokens, global attention over all real tokens, graph-relation attention
masked by part adjacency, image cross-attention where only bbox-row tokens
query the 256 patch features, and a feed-forward, all with residual skips.

Masking rules:
  - padded parts are never attended to and their output rows are zero;
  - the graph mask is expanded token-level: tokens of part i may attend to
    tokens of part j iff i == j or the parts are adjacent in the tree;
  - a dropped graph degenerates to self-only (within-part) attention;
  - a dropped image skips cross-attention via identity exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import torch
from torch import nn

from ..conditioning import N_PATCHES, ForegroundMask, PatchFeatureGrid
from ..core import CATEGORIES, MAX_PARTS, ConnectivityGraph
from ..data.encoding import N_ATTRS, N_DIMS, AttributeTensor
from ..errors import NonFiniteActivation, MissingImage, ShapeMismatch

N_TOKENS = MAX_PARTS * N_ATTRS
BBOX_ROW = 0


@dataclass(frozen=True)
class DenoiserConfig:
    """Architecture and classifier-free dropout settings."""

    layers: int = 6
    heads: int = 4
    hidden: int = 128
    d_f: int = 32
    n_categories: int = len(CATEGORIES)
    drop_graph: float = 0.5
    drop_category: float = 0.5
    drop_image: float = 0.1

    def __post_init__(self):
        if self.layers < 1:
            raise ValueError("layers must be >= 1")
        if self.hidden % self.heads != 0:
            raise ValueError(
                f"hidden {self.hidden} not divisible by heads {self.heads}")
        for name in ("drop_graph", "drop_category", "drop_image"):
            rate = getattr(self, name)
            if not 0.0 <= rate <= 1.0:
                raise ValueError(f"{name} = {rate} outside [0, 1]")


@dataclass(frozen=True)
class GraphMask:
    """Part-level adjacency (tree edges + self loops) and slot occupancy."""

    adjacency: np.ndarray
    padding_mask: np.ndarray

    def __init__(self, adjacency, padding_mask):
        adj = np.asarray(adjacency, dtype=bool).reshape(MAX_PARTS, MAX_PARTS)
        pad = np.asarray(padding_mask, dtype=bool).reshape(MAX_PARTS)
        adj = adj.copy()
        pad = pad.copy()
        adj.setflags(write=False)
        pad.setflags(write=False)
        object.__setattr__(self, "adjacency", adj)
        object.__setattr__(self, "padding_mask", pad)

    @staticmethod
    def from_graph(graph: ConnectivityGraph) -> "GraphMask":
        """Slots follow ascending part id, matching the tensor encoding."""
        ids = graph.ids()
        if len(ids) > MAX_PARTS:
            raise ShapeMismatch(f"{len(ids)} parts exceed {MAX_PARTS} slots")
        slot = {pid: i for i, pid in enumerate(ids)}
        adj = np.zeros((MAX_PARTS, MAX_PARTS), dtype=bool)
        pad = np.zeros(MAX_PARTS, dtype=bool)
        for pid in ids:
            pad[slot[pid]] = True
            adj[slot[pid], slot[pid]] = True
        for child, parent in graph.parent_of.items():
            adj[slot[child], slot[parent]] = True
            adj[slot[parent], slot[child]] = True
        return GraphMask(adj, pad)

    def n_parts(self) -> int:
        return int(self.padding_mask.sum())


@dataclass(frozen=True)
class ConditioningBundle:
    """Conditions for one denoising call; None means dropped."""

    features: PatchFeatureGrid | None = None
    graph_mask: GraphMask | None = None
    category: int | None = None
    fg_mask: ForegroundMask | None = None

    def without_image(self) -> "ConditioningBundle":
        return ConditioningBundle(None, self.graph_mask, self.category,
                                  self.fg_mask)


@dataclass(frozen=True)
class AttentionRecord:
    """Head-averaged cross-attention rows per layer per part slot."""

    weights: np.ndarray
    padding_mask: np.ndarray

    def __init__(self, weights, padding_mask):
        w = np.asarray(weights, dtype=float)
        pad = np.asarray(padding_mask, dtype=bool).reshape(MAX_PARTS)
        if w.ndim != 3 or w.shape[1:] != (MAX_PARTS, N_PATCHES):
            raise ShapeMismatch(f"weights shape {w.shape}")
        if (w < 0).any():
            raise ValueError("attention weights must be nonnegative")
        sums = w[:, pad].sum(axis=-1)
        if not np.allclose(sums, 1.0, atol=1e-5):
            raise ValueError("real attention rows must sum to 1")
        if not np.all(w[:, ~pad] == 0.0):
            raise ValueError("padded attention rows must be zero")
        w = w.copy()
        pad = pad.copy()
        w.setflags(write=False)
        pad.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "padding_mask", pad)

    @property
    def layers(self) -> int:
        return self.weights.shape[0]


def timestep_embedding(t: torch.Tensor, dim: int) -> torch.Tensor:
    """Sinusoidal embedding of 1-based timesteps; shape (B, dim)."""
    half = dim // 2
    freqs = torch.exp(
        -math.log(10_000.0) * torch.arange(half, dtype=torch.float32)
        / max(half - 1, 1)).to(t.device)
    args = t.float()[:, None] * freqs[None, :]
    emb = torch.cat([torch.sin(args), torch.cos(args)], dim=-1)
    if dim % 2:
        emb = torch.nn.functional.pad(emb, (0, 1))
    return emb


class MaskedAttention(nn.Module):
    """Multi-head attention with a boolean allow-mask.

    Disallowed pairs get exactly zero post-softmax weight; fully-masked
    query rows produce zero output instead of NaN.
    """

    def __init__(self, hidden: int, heads: int, kv_width: int | None = None):
        super().__init__()
        self.heads = heads
        self.head_dim = hidden // heads
        kv_width = hidden if kv_width is None else kv_width
        self.q = nn.Linear(hidden, hidden)
        self.k = nn.Linear(kv_width, hidden)
        self.v = nn.Linear(kv_width, hidden)
        self.out = nn.Linear(hidden, hidden)

    def forward(self, queries, keys_values, allow):
        b, lq, _ = queries.shape
        lk = keys_values.shape[1]

        def split(x, proj, length):
            return proj(x).view(b, length, self.heads, self.head_dim).transpose(1, 2)

        q = split(queries, self.q, lq)
        k = split(keys_values, self.k, lk)
        v = split(keys_values, self.v, lk)
        scores = q @ k.transpose(-1, -2) / math.sqrt(self.head_dim)
        scores = scores.masked_fill(~allow[:, None], float("-inf"))
        weights = torch.softmax(scores, dim=-1)
        weights = torch.nan_to_num(weights, nan=0.0)
        fused = (weights @ v).transpose(1, 2).reshape(b, lq, -1)
        return self.out(fused), weights.mean(dim=1)


class AdaptiveNorm(nn.Module):
    """LayerNorm modulated by a conditioning vector (scale and shift)."""

    def __init__(self, hidden: int):
        super().__init__()
        self.norm = nn.LayerNorm(hidden, elementwise_affine=False)
        self.modulation = nn.Linear(hidden, 2 * hidden)
        nn.init.zeros_(self.modulation.weight)
        nn.init.zeros_(self.modulation.bias)

    def forward(self, x, cond):
        scale, shift = self.modulation(cond).chunk(2, dim=-1)
        return self.norm(x) * (1.0 + scale[:, None]) + shift[:, None]


class DenoiserBlock(nn.Module):
    def __init__(self, cfg: DenoiserConfig):
        super().__init__()
        self.adaln = AdaptiveNorm(cfg.hidden)
        self.local_attn = MaskedAttention(cfg.hidden, cfg.heads)
        self.global_attn = MaskedAttention(cfg.hidden, cfg.heads)
        self.graph_attn = MaskedAttention(cfg.hidden, cfg.heads)
        self.cross_attn = MaskedAttention(cfg.hidden, cfg.heads)
        self.ffn_norm = nn.LayerNorm(cfg.hidden)
        self.ffn = nn.Sequential(
            nn.Linear(cfg.hidden, 4 * cfg.hidden),
            nn.GELU(),
            nn.Linear(4 * cfg.hidden, cfg.hidden),
        )

    def forward(self, tokens, cond_vec, masks, patches, image_present):
        local_allow, global_allow, graph_allow, cross_allow = masks
        h = self.adaln(tokens, cond_vec)
        out, _ = self.local_attn(h, h, local_allow)
        h = h + out
        out, _ = self.global_attn(h, h, global_allow)
        h = h + out
        out, _ = self.graph_attn(h, h, graph_allow)
        h = h + out
        # Only bbox-row tokens query the image; dropped image = identity.
        bbox_tokens = h[:, BBOX_ROW::N_ATTRS]
        cross_out, cross_weights = self.cross_attn(bbox_tokens, patches,
                                                   cross_allow)
        gate = image_present.float()[:, None, None]
        residual = torch.zeros_like(h)
        residual[:, BBOX_ROW::N_ATTRS] = gate * cross_out
        h = h + residual
        h = h + self.ffn(self.ffn_norm(h))
        return h, cross_weights * image_present.float()[:, None, None]


class Denoiser(nn.Module):
    """Predicts the residual noise for a batch of attribute tensors."""

    def __init__(self, cfg: DenoiserConfig):
        super().__init__()
        self.cfg = cfg
        self.token_proj = nn.Linear(N_DIMS, cfg.hidden)
        self.attr_embed = nn.Parameter(torch.zeros(N_ATTRS, cfg.hidden))
        self.part_embed = nn.Parameter(torch.zeros(MAX_PARTS, cfg.hidden))
        nn.init.normal_(self.attr_embed, std=0.02)
        nn.init.normal_(self.part_embed, std=0.02)
        self.time_mlp = nn.Sequential(
            nn.Linear(cfg.hidden, cfg.hidden), nn.SiLU(),
            nn.Linear(cfg.hidden, cfg.hidden))
        # Extra slot: the dropped/absent category.
        self.category_embed = nn.Embedding(cfg.n_categories + 1, cfg.hidden)
        self.patch_proj = nn.Linear(cfg.d_f, cfg.hidden)
        self.blocks = nn.ModuleList(
            DenoiserBlock(cfg) for _ in range(cfg.layers))
        self.head_norm = nn.LayerNorm(cfg.hidden)
        self.head = nn.Linear(cfg.hidden, N_DIMS)

    def _attention_masks(self, adjacency, part_real):
        b = part_real.shape[0]
        device = part_real.device
        token_part = torch.arange(N_TOKENS, device=device) // N_ATTRS
        token_real = part_real[:, token_part]
        same_part = token_part[:, None] == token_part[None, :]
        key_real = token_real[:, None, :]
        local_allow = same_part[None] & key_real
        global_allow = key_real.expand(b, N_TOKENS, N_TOKENS)
        graph_token = adjacency[:, token_part][:, :, token_part]
        graph_allow = graph_token & key_real
        cross_allow = part_real[:, :, None].expand(b, MAX_PARTS, N_PATCHES)
        return local_allow, global_allow, graph_allow, cross_allow

    def forward(self, x, part_real, t, adjacency, category, patches,
                image_present):
        """All-tensor forward.

        x (B,32,5,6); part_real (B,32) bool; t (B,) 1-based; adjacency
        (B,32,32) bool (identity rows when the graph is dropped); category
        (B,) long with ``n_categories`` meaning absent; patches (B,256,d_f);
        image_present (B,) bool. Returns eps-hat (B,32,5,6) and the
        per-layer head-averaged cross-attention stack (L,B,32,256).
        """
        b = x.shape[0]
        tokens = self.token_proj(x.reshape(b, N_TOKENS, N_DIMS))
        tokens = tokens + self.attr_embed.repeat(MAX_PARTS, 1)[None]
        tokens = tokens + self.part_embed.repeat_interleave(N_ATTRS, 0)[None]
        cond_vec = self.time_mlp(timestep_embedding(t, self.cfg.hidden))
        cond_vec = cond_vec + self.category_embed(category)
        masks = self._attention_masks(adjacency, part_real)
        patch_tokens = self.patch_proj(patches)
        attn_stack = []
        h = tokens
        for block in self.blocks:
            h, cross_weights = block(h, cond_vec, masks, patch_tokens,
                                     image_present)
            attn_stack.append(cross_weights)
        eps = self.head(self.head_norm(h)).reshape(b, MAX_PARTS, N_ATTRS,
                                                   N_DIMS)
        eps = eps * part_real[:, :, None, None].float()
        return eps, torch.stack(attn_stack)


def _prepare_batch_tensors(cfg: DenoiserConfig, x_np, part_real_np, t_int,
                           bundle: ConditioningBundle):
    """Single-sample tensors from numpy inputs and a bundle."""
    x = torch.from_numpy(np.array(x_np, dtype=np.float32))[None]
    part_real = torch.from_numpy(np.array(part_real_np, dtype=bool))[None]
    t = torch.tensor([t_int], dtype=torch.long)
    if bundle.graph_mask is not None:
        adjacency = torch.from_numpy(
            np.array(bundle.graph_mask.adjacency, dtype=bool))[None]
    else:
        adjacency = torch.eye(MAX_PARTS, dtype=torch.bool)[None]
    category = torch.tensor(
        [cfg.n_categories if bundle.category is None else bundle.category],
        dtype=torch.long)
    if bundle.features is not None:
        if bundle.features.d_f != cfg.d_f:
            raise ShapeMismatch(
                f"feature width {bundle.features.d_f} != model d_f {cfg.d_f}")
        patches = torch.from_numpy(
            np.array(bundle.features.features, dtype=np.float32))[None]
        image_present = torch.tensor([True])
    else:
        patches = torch.zeros(1, N_PATCHES, cfg.d_f)
        image_present = torch.tensor([False])
    return x, part_real, t, adjacency, category, patches, image_present


def denoise_step(model: Denoiser, x_t: AttributeTensor, t: int,
                 cond: ConditioningBundle):
    """One inference denoising evaluation; returns (eps-hat, attention).

    The attention record rows are zero when the image is absent or for
    padded parts.
    """
    tensors = _prepare_batch_tensors(model.cfg, x_t.data, x_t.padding_mask,
                                     t, cond)
    with torch.no_grad():
        eps, attn = model(*tensors)
    if not torch.isfinite(eps).all():
        raise NonFiniteActivation("denoiser produced non-finite noise")
    eps_np = eps[0].double().numpy()
    eps_np[~x_t.padding_mask] = 0.0
    return eps_np, attn[:, 0].double().numpy()


def export_attention(model: Denoiser, x_t: AttributeTensor, t: int,
                     cond: ConditioningBundle) -> AttentionRecord:
    """Cross-attention rows for visualization; requires the image."""
    if cond.features is None:
        raise MissingImage("attention export requires image conditioning")
    _, attn = denoise_step(model, x_t, t, cond)
    return AttentionRecord(attn, x_t.padding_mask)
