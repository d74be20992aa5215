"""Minimal triangle-soup mesh with seeded area-weighted surface sampling."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import EmptyMesh
from .types import Aabb, RigidTransform


@dataclass(frozen=True)
class TriMesh:
    """Triangle soup: ``vertices`` (V,3) float and ``faces`` (F,3) int."""

    vertices: np.ndarray
    faces: np.ndarray

    def __init__(self, vertices, faces):
        v = np.asarray(vertices, dtype=float).reshape(-1, 3)
        f = np.asarray(faces, dtype=np.int64).reshape(-1, 3)
        if not np.isfinite(v).all():
            raise ValueError("mesh vertices must be finite")
        if f.size and (f.min() < 0 or f.max() >= len(v)):
            raise ValueError("face indices out of range")
        v.setflags(write=False)
        f.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "faces", f)

    def aabb(self) -> Aabb:
        if not len(self.vertices):
            raise EmptyMesh("mesh has no vertices")
        return Aabb.of_points(self.vertices)

    def face_areas(self) -> np.ndarray:
        a = self.vertices[self.faces[:, 0]]
        b = self.vertices[self.faces[:, 1]]
        c = self.vertices[self.faces[:, 2]]
        return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)

    def area(self) -> float:
        return float(self.face_areas().sum())

    def sample_surface(self, n: int, seed: int = 0) -> np.ndarray:
        """n points drawn area-weighted over faces, uniform per triangle."""
        if not len(self.faces):
            raise EmptyMesh("mesh has no triangles to sample")
        areas = self.face_areas()
        total = areas.sum()
        if total <= 0:
            raise EmptyMesh("mesh surface area is zero")
        rng = np.random.default_rng(seed)
        idx = rng.choice(len(self.faces), size=n, p=areas / total)
        a = self.vertices[self.faces[idx, 0]]
        b = self.vertices[self.faces[idx, 1]]
        c = self.vertices[self.faces[idx, 2]]
        u = rng.uniform(size=(n, 1))
        v = rng.uniform(size=(n, 1))
        flip = (u + v) > 1.0
        u = np.where(flip, 1.0 - u, u)
        v = np.where(flip, 1.0 - v, v)
        return a + u * (b - a) + v * (c - a)

    def transformed(self, t: RigidTransform) -> "TriMesh":
        return TriMesh(t.apply(self.vertices), self.faces)

    def scaled(self, factors, translation=(0.0, 0.0, 0.0)) -> "TriMesh":
        s = np.asarray(factors, dtype=float).reshape(3)
        d = np.asarray(translation, dtype=float).reshape(3)
        return TriMesh(self.vertices * s + d, self.faces)


_BOX_FACES = np.array([
    [0, 1, 3], [0, 3, 2],  # x = lo
    [4, 6, 7], [4, 7, 5],  # x = hi
    [0, 4, 5], [0, 5, 1],  # y = lo
    [2, 3, 7], [2, 7, 6],  # y = hi
    [0, 2, 6], [0, 6, 4],  # z = lo
    [1, 5, 7], [1, 7, 3],  # z = hi
], dtype=np.int64)


def box_mesh(bbox: Aabb) -> TriMesh:
    """Closed box mesh using the Aabb corner bit order."""
    return TriMesh(bbox.corners(), _BOX_FACES)
