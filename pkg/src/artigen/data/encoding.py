"""Fixed-size tensor encoding of part attributes for the diffusion model.

Every object becomes a [32 parts x 5 attribute rows x 6 dims] tensor plus a
32-long padding mask. Row layout per part:

    0  bounding box           (center x,y,z, half-extent x,y,z)
    1  joint axis             (origin x,y,z, direction x,y,z)
    2  motion range           (lo, hi, screw_pitch, 0, 0, 0)
    3  joint type one-hot     (5 types padded to 6)
    4  semantic label one-hot (6 labels)

Rows of padded (absent) parts are exactly zero.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import (
    DEFAULT_SCREW_PITCH,
    JOINT_TYPES,
    MAX_PARTS,
    SEMANTIC_LABELS,
    Aabb,
    ArticulatedAbstraction,
    ConnectivityGraph,
    Joint,
    JointType,
    PartAbstraction,
    Vec3,
)
from ..errors import MaskGraphMismatch, TooManyParts
from ..utils.validation import check_array

N_ATTRS = 5
N_DIMS = 6
MIN_HALF_EXTENT = 1e-4


@dataclass(frozen=True)
class AttributeTensor:
    """Padded attribute tensor: ``data`` (32,5,6) and ``padding_mask`` (32,)."""

    data: np.ndarray
    padding_mask: np.ndarray

    def __init__(self, data, padding_mask):
        data = check_array(data, "data", shape=(MAX_PARTS, N_ATTRS, N_DIMS))
        mask = np.asarray(padding_mask, dtype=bool).reshape(MAX_PARTS)
        if not np.all(data[~mask] == 0.0):
            raise ValueError("padded rows must be exactly zero")
        data = data.copy()
        data.setflags(write=False)
        mask = mask.copy()
        mask.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "padding_mask", mask)

    def n_parts(self) -> int:
        return int(self.padding_mask.sum())


def encode_attributes(obj: ArticulatedAbstraction) -> AttributeTensor:
    """Pack an object's parts (ascending id order) into an AttributeTensor."""
    parts = obj.sorted_parts()
    if len(parts) > MAX_PARTS:
        raise TooManyParts(f"{len(parts)} parts exceed the cap of {MAX_PARTS}")
    data = np.zeros((MAX_PARTS, N_ATTRS, N_DIMS), dtype=float)
    mask = np.zeros(MAX_PARTS, dtype=bool)
    for i, p in enumerate(parts):
        j = p.joint
        data[i, 0, :3] = p.bbox.center()
        data[i, 0, 3:] = p.bbox.half_extent()
        data[i, 1, :3] = j.axis_origin.as_array()
        data[i, 1, 3:] = j.axis_direction.as_array()
        data[i, 2, 0] = j.range[0]
        data[i, 2, 1] = j.range[1]
        data[i, 2, 2] = j.screw_pitch
        data[i, 3, JOINT_TYPES.index(j.joint_type)] = 1.0
        data[i, 4, SEMANTIC_LABELS.index(p.label)] = 1.0
        mask[i] = True
    return AttributeTensor(data, mask)


def _decode_direction(raw: np.ndarray) -> Vec3:
    n = float(np.linalg.norm(raw))
    if n < 1e-8:
        return Vec3(0.0, 0.0, 1.0)
    return Vec3.from_array(raw / n)


def decode_attributes(t: AttributeTensor, g: ConnectivityGraph
                      ) -> ArticulatedAbstraction:
    """Inverse of :func:`encode_attributes`, tolerant of noisy rows.

    The graph supplies part ids and topology; everything else (including
    labels) comes from the tensor via argmax. Half-extents are clamped to at
    least 1e-4 and the axis direction is renormalized, so tensors produced by
    a generative model always decode to a well-formed object.
    """
    ids = g.ids()
    if t.n_parts() != len(ids):
        raise MaskGraphMismatch(
            f"mask marks {t.n_parts()} parts but graph has {len(ids)} nodes")
    rows = np.flatnonzero(t.padding_mask)
    parts = []
    for row, pid in zip(rows, ids):
        d = t.data[row]
        center = d[0, :3]
        half = np.maximum(d[0, 3:], MIN_HALF_EXTENT)
        jt = JOINT_TYPES[int(np.argmax(d[3, :len(JOINT_TYPES)]))]
        label = SEMANTIC_LABELS[int(np.argmax(d[4]))]
        lo, hi = float(d[2, 0]), float(d[2, 1])
        if lo > hi:
            lo, hi = hi, lo
        if jt is JointType.FIXED:
            lo = hi = 0.0
        pitch = float(d[2, 2])
        joint = Joint(jt, Vec3.from_array(d[1, :3]), _decode_direction(d[1, 3:]),
                      (lo, hi),
                      screw_pitch=pitch if pitch > 0 else DEFAULT_SCREW_PITCH)
        parts.append(PartAbstraction(
            id=pid, label=label,
            bbox=Aabb.from_center_halfextent(center, half),
            joint=joint, parent=g.parent_of.get(pid)))
    # rebuild the graph so node labels agree with the decoded label rows
    return ArticulatedAbstraction.from_parts(parts)
