"""Scikit-learn style facade: feature extraction, generation, assembly.

Each estimator follows the fit/transform/predict conventions so the
pipeline slots into sklearn tooling (``get_params``, ``clone``,
``Pipeline``). Fitted state lives in trailing-underscore attributes.
"""
from __future__ import annotations

from typing import Optional

import torch
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .conditioning import sample_camera, synthetic_features
from .core import CATEGORIES, ArticulatedAbstraction, ConnectivityGraph
from .data import ObjectRecord, decode_attributes
from .diffusion import (
    ConditioningBundle,
    Denoiser,
    DenoiserConfig,
    GraphMask,
    SamplerConfig,
    TrainConfig,
    example_from_record,
    make_schedule,
    sample,
    train,
)
from .retrieval import AssembleConfig, PartLibrary, assemble
from .utils.validation import derive_seed


def _as_object(item) -> ArticulatedAbstraction:
    return item.obj if isinstance(item, ObjectRecord) else item


def _require_fitted(estimator, attr: str) -> None:
    if not hasattr(estimator, attr):
        raise NotFittedError(
            f"{type(estimator).__name__} must be fitted before use")


class PatchFeatureExtractor(BaseEstimator, TransformerMixin):
    """Render image-patch feature grids for objects from sampled cameras.

    Stateless; ``fit`` only validates. ``transform`` returns one
    (PatchFeatureGrid, ForegroundMask) pair per input object, with the
    camera drawn deterministically from ``camera_seed`` and the item index.
    """

    def __init__(self, camera_seed: int = 0):
        self.camera_seed = camera_seed

    def fit(self, X, y=None):
        for item in X:
            _as_object(item)
        return self

    def transform(self, X) -> list:
        out = []
        for i, item in enumerate(X):
            cam = sample_camera(derive_seed(self.camera_seed, "camera", i))
            out.append(synthetic_features(_as_object(item), cam))
        return out


class DiffusionGenerator(BaseEstimator):
    """Graph-masked denoising generator over part-attribute tensors.

    ``fit`` trains a denoiser on object records (or prebuilt training
    examples); ``sample`` draws one attribute tensor for a conditioning
    bundle; ``predict`` maps connectivity graphs to decoded objects.
    """

    def __init__(self, layers: int = 6, heads: int = 4, hidden: int = 128,
                 d_f: int = 32, timesteps: int = 1000, lam: float = 0.1,
                 lr: float = 1e-4, weight_decay: float = 0.0,
                 batch_size: int = 40, timesteps_per_object: int = 16,
                 epochs: int = 200, omega: float = 0.0, seed: int = 0):
        self.layers = layers
        self.heads = heads
        self.hidden = hidden
        self.d_f = d_f
        self.timesteps = timesteps
        self.lam = lam
        self.lr = lr
        self.weight_decay = weight_decay
        self.batch_size = batch_size
        self.timesteps_per_object = timesteps_per_object
        self.epochs = epochs
        self.omega = omega
        self.seed = seed

    def _train_config(self) -> TrainConfig:
        return TrainConfig(
            lam=self.lam, lr=self.lr, weight_decay=self.weight_decay,
            batch_size=self.batch_size,
            timesteps_per_object=self.timesteps_per_object,
            epochs=self.epochs, seed=self.seed)

    def fit(self, X, y=None, log_path=None):
        examples = [
            example_from_record(item, camera_seed=derive_seed(
                self.seed, "camera", i))
            if isinstance(item, ObjectRecord) else item
            for i, item in enumerate(X)]
        self.schedule_ = make_schedule(self.timesteps)
        torch.manual_seed(derive_seed(self.seed, "init"))
        self.model_ = Denoiser(DenoiserConfig(
            layers=self.layers, heads=self.heads, hidden=self.hidden,
            d_f=self.d_f))
        self.history_ = train(self.model_, examples, self.schedule_,
                              self._train_config(), log_path=log_path)
        return self

    def sample(self, cond: ConditioningBundle, pins=None,
               seed: Optional[int] = None):
        _require_fitted(self, "model_")
        cfg = SamplerConfig(omega=self.omega,
                            seed=self.seed if seed is None else seed)
        return sample(self.model_, cond, cfg, self.schedule_, pins=pins)

    def predict(self, X) -> list:
        """One decoded object per connectivity graph, seeded by position."""
        _require_fitted(self, "model_")
        out = []
        for i, graph in enumerate(X):
            if not isinstance(graph, ConnectivityGraph):
                raise TypeError(
                    f"predict expects connectivity graphs, got {type(graph)}")
            cond = ConditioningBundle(graph_mask=GraphMask.from_graph(graph))
            tensor = self.sample(cond,
                                 seed=derive_seed(self.seed, "predict", i))
            out.append(decode_attributes(tensor, graph))
        return out


class RetrievalAssembler(BaseEstimator, TransformerMixin):
    """Fit a part library from records, then assemble generated objects."""

    def __init__(self, k_states: int = 5, mesh_root=None):
        self.k_states = k_states
        self.mesh_root = mesh_root

    def fit(self, X, y=None):
        self.library_ = PartLibrary(X, mesh_root=self.mesh_root)
        return self

    def transform(self, X) -> list:
        _require_fitted(self, "library_")
        cfg = AssembleConfig(k_states=self.k_states)
        return [assemble(_as_object(item), self.library_, cfg) for item in X]

    def predict(self, X) -> list:
        return self.transform(X)
