"""Denoising diffusion over part-attribute tokens."""
from .checkpoint import load_checkpoint, save_checkpoint, tensor_manifest
from .losses import foreground_loss, foreground_loss_torch, noise_loss
from .model import (
    AttentionRecord,
    ConditioningBundle,
    Denoiser,
    DenoiserConfig,
    GraphMask,
    denoise_step,
    export_attention,
    timestep_embedding,
)
from .sampling import PinSet, SamplerConfig, cfg_epsilon, sample
from .schedule import (
    DEFAULT_BETA_1,
    DEFAULT_BETA_T,
    DEFAULT_STEPS,
    NoiseSchedule,
    add_noise,
    make_schedule,
)
from .training import (
    TrainConfig,
    TrainExample,
    example_from_record,
    sample_drops,
    train,
    training_step,
)

__all__ = [
    "load_checkpoint",
    "save_checkpoint",
    "tensor_manifest",
    "foreground_loss",
    "foreground_loss_torch",
    "noise_loss",
    "AttentionRecord",
    "ConditioningBundle",
    "Denoiser",
    "DenoiserConfig",
    "GraphMask",
    "denoise_step",
    "export_attention",
    "timestep_embedding",
    "PinSet",
    "SamplerConfig",
    "cfg_epsilon",
    "sample",
    "DEFAULT_BETA_1",
    "DEFAULT_BETA_T",
    "DEFAULT_STEPS",
    "NoiseSchedule",
    "add_noise",
    "make_schedule",
    "TrainConfig",
    "TrainExample",
    "example_from_record",
    "sample_drops",
    "train",
    "training_step",
]
