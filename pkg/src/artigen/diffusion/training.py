"""Classifier-free training loop for the attribute denoiser.

Each iteration draws a batch of objects and, per object, 16 timesteps; the
graph/category conditions are independently dropped at 50% and the image
at 10%, so the model learns conditional and unconditional prediction
jointly. Loss: L = L_eps + lambda * L_fg (the foreground term only where
the image survived the drop).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from ..conditioning import ForegroundMask, PatchFeatureGrid, sample_camera, synthetic_features
from ..core import CATEGORIES, MAX_PARTS
from ..data.encoding import AttributeTensor, encode_attributes
from ..data.records import ObjectRecord
from ..errors import NonFiniteLoss
from ..utils.validation import check_positive, check_seed, derive_seed
from .model import Denoiser, DenoiserConfig, GraphMask
from .losses import foreground_loss_torch, noise_loss
from .schedule import NoiseSchedule


@dataclass(frozen=True)
class TrainConfig:
    """Optimization settings; defaults follow the full-scale recipe."""

    lam: float = 0.1
    lr: float = 1e-4
    weight_decay: float = 0.0
    batch_size: int = 40
    timesteps_per_object: int = 16
    epochs: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lam must be >= 0")
        check_positive(self.lr, "lr")
        check_positive(self.batch_size, "batch_size")
        check_positive(self.timesteps_per_object, "timesteps_per_object")
        check_seed(self.seed)


@dataclass(frozen=True)
class TrainExample:
    """One object prepared for training."""

    x0: AttributeTensor
    graph_mask: GraphMask
    category: int | None
    features: PatchFeatureGrid | None
    fg_mask: ForegroundMask | None


def example_from_record(rec: ObjectRecord, camera_seed: int) -> TrainExample:
    """Encode a record and render its synthetic conditioning features."""
    cam = sample_camera(camera_seed)
    grid, fg = synthetic_features(rec.obj, cam)
    category = (CATEGORIES.index(rec.obj.category)
                if rec.obj.category in CATEGORIES else None)
    return TrainExample(
        x0=encode_attributes(rec.obj),
        graph_mask=GraphMask.from_graph(rec.obj.graph),
        category=category,
        features=grid,
        fg_mask=fg,
    )


def sample_drops(rng: np.random.Generator, n: int, cfg: DenoiserConfig):
    """Independent per-instance condition drops: (graph, category, image)."""
    return (rng.random(n) < cfg.drop_graph,
            rng.random(n) < cfg.drop_category,
            rng.random(n) < cfg.drop_image)


def _expand_batch(model: Denoiser, batch, schedule: NoiseSchedule,
                  cfg: TrainConfig, rng: np.random.Generator):
    """Tensorize a batch: every object replicated per drawn timestep."""
    mcfg = model.cfg
    reps = cfg.timesteps_per_object
    n = len(batch) * reps
    drop_graph, drop_category, drop_image = sample_drops(rng, n, mcfg)

    x0 = np.zeros((n, MAX_PARTS, 5, 6), dtype=np.float32)
    part_real = np.zeros((n, MAX_PARTS), dtype=bool)
    adjacency = np.zeros((n, MAX_PARTS, MAX_PARTS), dtype=bool)
    category = np.full(n, mcfg.n_categories, dtype=np.int64)
    patches = np.zeros((n, 256, mcfg.d_f), dtype=np.float32)
    fg = np.zeros((n, 256), dtype=np.float32)
    has_image = np.zeros(n, dtype=bool)
    t = rng.integers(1, schedule.T + 1, size=n)

    eye = np.eye(MAX_PARTS, dtype=bool)
    for bi, ex in enumerate(batch):
        for r in range(reps):
            i = bi * reps + r
            x0[i] = ex.x0.data
            part_real[i] = ex.x0.padding_mask
            if drop_graph[i]:
                adjacency[i] = eye
            else:
                adjacency[i] = ex.graph_mask.adjacency
            if ex.category is not None and not drop_category[i]:
                category[i] = ex.category
            if ex.features is not None and not drop_image[i]:
                patches[i] = ex.features.features
                has_image[i] = True
                if ex.fg_mask is not None:
                    fg[i] = ex.fg_mask.values
    eps = rng.standard_normal((n, MAX_PARTS, 5, 6)).astype(np.float32)
    eps[~part_real] = 0.0
    abar = schedule.alpha_bars[t - 1].astype(np.float32)
    x_t = (np.sqrt(abar)[:, None, None, None] * x0
           + np.sqrt(1.0 - abar)[:, None, None, None] * eps)
    x_t[~part_real] = 0.0
    to = torch.from_numpy
    return (to(x_t), to(part_real), to(t), to(adjacency), to(category),
            to(patches), to(has_image), to(eps), to(fg))


def training_step(model: Denoiser, optimizer, batch, schedule: NoiseSchedule,
                  cfg: TrainConfig, rng: np.random.Generator) -> dict:
    """One gradient step; returns the loss components as floats."""
    (x_t, part_real, t, adjacency, category, patches, has_image, eps,
     fg) = _expand_batch(model, batch, schedule, cfg, rng)
    model.train()
    optimizer.zero_grad()
    eps_hat, attn = model(x_t, part_real, t, adjacency, category, patches,
                          has_image)
    l_eps = noise_loss(eps_hat, eps, part_real)
    if has_image.any() and cfg.lam > 0:
        per_sample = foreground_loss_torch(attn, fg, part_real)
        l_fg = per_sample[has_image].mean()
    else:
        l_fg = torch.zeros(())
    loss = l_eps + cfg.lam * l_fg
    if not torch.isfinite(loss):
        raise NonFiniteLoss(f"loss = {float(loss)}")
    loss.backward()
    optimizer.step()
    return {"loss": float(loss.detach()), "l_eps": float(l_eps.detach()),
            "l_fg": float(l_fg.detach())}


def train(model: Denoiser, examples, schedule: NoiseSchedule,
          cfg: TrainConfig, log_path=None) -> list:
    """Seeded epoch loop over all examples; returns per-step log records.

    Log lines (also written as JSONL when ``log_path`` is given):
    {"step", "epoch", "l_eps", "l_fg", "loss", "lr"}.
    """
    examples = list(examples)
    rng = np.random.default_rng(derive_seed(cfg.seed, "train"))
    torch.manual_seed(derive_seed(cfg.seed, "init"))
    optimizer = torch.optim.AdamW(model.parameters(), lr=cfg.lr,
                                  weight_decay=cfg.weight_decay)
    history = []
    sink = Path(log_path).open("w") if log_path is not None else None
    try:
        step = 0
        for epoch in range(cfg.epochs):
            order = rng.permutation(len(examples))
            for start in range(0, len(order), cfg.batch_size):
                batch = [examples[i] for i in order[start:start + cfg.batch_size]]
                metrics = training_step(model, optimizer, batch, schedule,
                                        cfg, rng)
                record = {"step": step, "epoch": epoch, "lr": cfg.lr,
                          **metrics}
                history.append(record)
                if sink is not None:
                    sink.write(json.dumps(record) + "\n")
                step += 1
    finally:
        if sink is not None:
            sink.close()
    return history
