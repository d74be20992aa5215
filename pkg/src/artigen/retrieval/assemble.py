"""Candidate selection, label-based mesh matching, and box fitting.

The assembly pipeline turns a generated abstraction into mesh geometry:
pick the library object whose articulated-state centroid distance to the
generation is smallest, pull a mesh per part by semantic label from that
candidate, and fit each mesh into its generated box with an anisotropic
scale + translation.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..core import (
    Aabb,
    ArticulatedAbstraction,
    Joint,
    SemanticLabel,
    TriMesh,
    validate_graph,
)
from ..data import ObjectRecord
from ..errors import DegenerateMesh, EmptyLibrary, NoDefaultMesh, ValidationError
from ..metrics import DEFAULT_STATES, eval_D
from .library import PartLibrary, default_meshes

FIT_TOL = 1e-4
MIN_MESH_EXTENT = 1e-9


@dataclass(frozen=True)
class MeshSource:
    """Provenance of one assembled part's geometry.

    ``part_id`` is the candidate part the mesh came from, or None when the
    label was absent from the candidate and a default mesh filled in.
    """

    label: SemanticLabel
    object_id: str
    part_id: Optional[int]

    @property
    def is_default(self) -> bool:
        return self.part_id is None


@dataclass(frozen=True)
class BoxFit:
    """Axis-aligned anisotropic scale + translation."""

    scale: np.ndarray
    translation: np.ndarray

    def __init__(self, scale, translation):
        s = np.asarray(scale, dtype=float).reshape(3).copy()
        t = np.asarray(translation, dtype=float).reshape(3).copy()
        if not (np.isfinite(s).all() and np.isfinite(t).all()):
            raise ValueError("fit parameters must be finite")
        if np.any(s <= 0):
            raise ValueError(f"fit scale must be positive, got {s}")
        s.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "scale", s)
        object.__setattr__(self, "translation", t)

    def apply(self, mesh: TriMesh) -> TriMesh:
        return mesh.scaled(self.scale, self.translation)


@dataclass(frozen=True)
class AssembledPart:
    part_id: int
    label: SemanticLabel
    mesh: TriMesh  # fitted, in the resting world frame
    fit: BoxFit
    joint: Joint
    parent: Optional[int]
    source: MeshSource


@dataclass(frozen=True)
class AssembledObject:
    """Mesh-level articulated object; every fitted mesh fills its box."""

    abstraction: ArticulatedAbstraction
    parts: tuple
    candidate_id: str

    def __init__(self, abstraction, parts, candidate_id=""):
        parts = tuple(parts)
        by_id = {p.id: p for p in abstraction.parts}
        if sorted(by_id) != sorted(p.part_id for p in parts):
            raise ValidationError("assembled parts must cover the "
                                  "abstraction's part ids exactly")
        for p in parts:
            box = by_id[p.part_id].bbox
            got = p.mesh.aabb()
            err = max(np.abs(got.min.as_array() - box.min.as_array()).max(),
                      np.abs(got.max.as_array() - box.max.as_array()).max())
            if err > FIT_TOL:
                raise ValidationError(
                    f"part {p.part_id} mesh AABB misses its box by {err:.2e}")
        object.__setattr__(self, "abstraction", abstraction)
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "candidate_id", str(candidate_id))

    @property
    def part_meshes(self) -> dict:
        return {p.part_id: p.mesh for p in self.parts}

    def part(self, part_id: int) -> AssembledPart:
        for p in self.parts:
            if p.part_id == part_id:
                return p
        raise KeyError(part_id)


@dataclass(frozen=True)
class AssembleConfig:
    k_states: int = DEFAULT_STATES

    def __post_init__(self):
        if self.k_states < 2:
            raise ValueError(f"k_states must be >= 2, got {self.k_states}")


def select_candidate(gen: ArticulatedAbstraction, lib: PartLibrary,
                     k_states: int = DEFAULT_STATES) -> ObjectRecord:
    """Library entry minimizing articulated-state centroid distance.

    Ties break by resting-state centroid distance, then by entry order.
    """
    if not len(lib):
        raise EmptyLibrary("candidate selection over an empty library")
    keys = []
    for idx, rec in enumerate(lib.entries):
        as_d = eval_D(gen, rec.obj, kind="cdist", k_states=k_states)
        rs_d = eval_D(gen, rec.obj, kind="cdist", rest_only=True)
        keys.append((as_d, rs_d, idx))
    return lib.entries[min(keys)[2]]


def match_part_meshes(gen: ArticulatedAbstraction, candidate: ObjectRecord,
                      defaults: Optional[dict] = None) -> dict:
    """Map each generated part id to a mesh source by semantic label.

    Within a label the first generated part (ascending id) picks the
    candidate part with the nearest resting centroid; every later generated
    part of that label reuses the same source, keeping style consistent.
    Labels the candidate lacks fall back to the default mesh set.
    """
    defaults = default_meshes() if defaults is None else defaults
    pools: dict = {}
    for part in candidate.obj.sorted_parts():
        pools.setdefault(part.label, []).append(part)
    chosen: dict = {}
    out: dict = {}
    for g in gen.sorted_parts():
        if g.label not in chosen:
            pool = pools.get(g.label)
            if pool:
                center = g.bbox.center()
                best = min(pool, key=lambda p: (
                    float(np.linalg.norm(p.bbox.center() - center)), p.id))
                chosen[g.label] = MeshSource(g.label, candidate.object_id,
                                             best.id)
            elif g.label in defaults:
                chosen[g.label] = MeshSource(g.label, "", None)
            else:
                raise NoDefaultMesh(
                    f"candidate {candidate.object_id!r} has no "
                    f"{g.label.value!r} part and no default mesh exists")
        out[g.id] = chosen[g.label]
    return out


def fit_mesh_to_box(mesh: TriMesh, bbox: Aabb) -> BoxFit:
    """Anisotropic scale + translation mapping the mesh AABB onto bbox."""
    mesh_box = mesh.aabb()
    extent = mesh_box.extent()
    if np.any(extent < MIN_MESH_EXTENT):
        raise DegenerateMesh(
            f"mesh is flat along an axis (extent {extent}); cannot fit")
    scale = bbox.extent() / extent
    translation = bbox.center() - scale * mesh_box.center()
    return BoxFit(scale, translation)


def _resolve_source(lib: PartLibrary, candidate: ObjectRecord,
                    source: MeshSource) -> TriMesh:
    if source.is_default:
        return lib.default_for(source.label)
    return lib.mesh_for(candidate, source.part_id)


def assemble(gen: ArticulatedAbstraction, lib: PartLibrary,
             cfg: Optional[AssembleConfig] = None) -> AssembledObject:
    """Full retrieval pipeline: candidate, label matching, box fitting."""
    cfg = AssembleConfig() if cfg is None else cfg
    validate_graph(gen.graph)
    candidate = select_candidate(gen, lib, k_states=cfg.k_states)
    mapping = match_part_meshes(gen, candidate, defaults=lib.defaults)
    assembled = []
    for part in gen.sorted_parts():
        source = mapping[part.id]
        raw = _resolve_source(lib, candidate, source)
        fit = fit_mesh_to_box(raw, part.bbox)
        assembled.append(AssembledPart(
            part_id=part.id, label=part.label, mesh=fit.apply(raw), fit=fit,
            joint=part.joint, parent=part.parent, source=source))
    return AssembledObject(gen, tuple(assembled), candidate.object_id)
