"""Oriented-box distances: gIoU-based and centroid-based.

Intersection volumes come from exact vertex enumeration of the two-box
intersection polytope (corner containment plus edge/face crossings) followed
by a convex-hull volume; degenerate contact collapses to zero volume.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from ..core import Aabb, RigidTransform

#: Extents are clamped here when computing volumes so plane-thin parts
#: (doors) keep the metric finite.
MIN_EXTENT = 1e-6

_CONTAIN_TOL = 1e-9

#: Box edges as corner-index pairs in the Aabb bit order.
_EDGES = tuple((i, i ^ b) for i in range(8) for b in (1, 2, 4) if i < (i ^ b))


@dataclass(frozen=True)
class OrientedBox:
    """A box posed in world space: center, rotation columns, half extents."""

    center: np.ndarray
    rotation: np.ndarray
    half: np.ndarray

    def __init__(self, center, rotation, half):
        c = np.asarray(center, dtype=float).reshape(3)
        r = np.asarray(rotation, dtype=float).reshape(3, 3)
        h = np.asarray(half, dtype=float).reshape(3)
        if (h < 0).any():
            raise ValueError("half extents must be nonnegative")
        for a, name in ((c, "center"), (r, "rotation"), (h, "half")):
            a.setflags(write=False)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "rotation", r)
        object.__setattr__(self, "half", h)

    @staticmethod
    def from_aabb(bbox: Aabb, t: RigidTransform = None) -> "OrientedBox":
        if t is None:
            t = RigidTransform.identity()
        return OrientedBox(t.apply(bbox.center()), t.rotation,
                           bbox.half_extent())

    def corners(self) -> np.ndarray:
        signs = np.array([[1 if i & b else -1 for b in (4, 2, 1)]
                          for i in range(8)], dtype=float)
        return self.center + (signs * self.half) @ self.rotation.T

    def volume(self) -> float:
        return float(np.prod(np.maximum(2.0 * self.half, MIN_EXTENT)))

    def contains(self, points: np.ndarray, tol: float = _CONTAIN_TOL
                 ) -> np.ndarray:
        local = (np.atleast_2d(points) - self.center) @ self.rotation
        return (np.abs(local) <= self.half + tol).all(axis=1)


def _edge_face_points(a: OrientedBox, b: OrientedBox) -> list:
    """Points where edges of a cross face planes of b, inside both boxes."""
    corners = a.corners()
    pts = []
    for axis in range(3):
        normal = b.rotation[:, axis]
        for side in (-1.0, 1.0):
            offset = float(normal @ b.center) + side * b.half[axis]
            for i, j in _EDGES:
                p0, p1 = corners[i], corners[j]
                d0 = float(normal @ p0) - offset
                d1 = float(normal @ p1) - offset
                if d0 * d1 > 0 or d0 == d1:
                    continue
                s = d0 / (d0 - d1)
                pts.append(p0 + s * (p1 - p0))
    return pts


def intersection_volume(a: OrientedBox, b: OrientedBox) -> float:
    """Volume of the convex intersection polytope of two oriented boxes."""
    ca, cb = a.corners(), b.corners()
    pts = [ca[b.contains(ca)], cb[a.contains(cb)]]
    edge_pts = _edge_face_points(a, b) + _edge_face_points(b, a)
    if edge_pts:
        ep = np.array(edge_pts)
        keep = a.contains(ep) & b.contains(ep)
        pts.append(ep[keep])
    pts = np.vstack(pts)
    if len(pts) < 4:
        return 0.0
    try:
        return float(ConvexHull(pts).volume)
    except QhullError:
        return 0.0  # flat or lower-dimensional contact


def d_cdist_pair(a: OrientedBox, b: OrientedBox) -> float:
    return float(np.linalg.norm(a.center - b.center))


def d_giou_pair(a: OrientedBox, b: OrientedBox) -> float:
    """1 - gIoU of two boxes, in [0, 2].

    gIoU = IoU - |C \\ (A u B)| / |C| with C the minimal enclosing convex
    region of both boxes, so identical boxes score exactly 0.
    """
    if np.array_equal(a.corners(), b.corners()):
        return 0.0
    va, vb = a.volume(), b.volume()
    inter = min(intersection_volume(a, b), va, vb)
    union = va + vb - inter
    pts = np.vstack([a.corners(), b.corners()])
    try:
        vc = float(ConvexHull(pts).volume)
    except QhullError:
        vc = float(np.prod(np.maximum(pts.max(axis=0) - pts.min(axis=0),
                                      MIN_EXTENT)))
    vc = max(vc, union)
    giou = inter / union - (vc - union) / vc
    return 1.0 - giou
