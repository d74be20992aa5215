"""Core data model for articulated objects.

Objects are rigid parts connected by joints into a rooted tree. All spatial
quantities live in a normalized world frame: the resting-state union bounding
box is centered at the origin with longest edge 2 (see
:func:`artigen.core.kinematics.normalize_object`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional

import numpy as np

UNIT_TOL = 1e-6
MAX_PARTS = 32
DEFAULT_SCREW_PITCH = 0.05
CONTINUOUS_RANGE = (0.0, 2.0 * math.pi)


class JointType(Enum):
    FIXED = "fixed"
    REVOLUTE = "revolute"
    PRISMATIC = "prismatic"
    CONTINUOUS = "continuous"
    SCREW = "screw"


class SemanticLabel(Enum):
    BASE = "base"
    DOOR = "door"
    DRAWER = "drawer"
    HANDLE = "handle"
    KNOB = "knob"
    TRAY = "tray"


#: Enum-order indices used by the one-hot tensor encoding.
JOINT_TYPES = tuple(JointType)
SEMANTIC_LABELS = tuple(SemanticLabel)

ROTATIONAL_TYPES = frozenset(
    {JointType.REVOLUTE, JointType.CONTINUOUS, JointType.SCREW}
)

#: Object categories in one-hot encoding order.
CATEGORIES = (
    "Storage",
    "Table",
    "Refrigerator",
    "Dishwasher",
    "Oven",
    "Washer",
    "Microwave",
)


@dataclass(frozen=True)
class Vec3:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise ValueError(f"Vec3 components must be finite, got {self}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    @staticmethod
    def from_array(a) -> "Vec3":
        a = np.asarray(a, dtype=float).reshape(3)
        return Vec3(float(a[0]), float(a[1]), float(a[2]))

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)


@dataclass(frozen=True)
class Joint:
    """Joint attaching a part to its parent.

    ``range`` is (lo, hi): radians for rotational types, world units for
    prismatic. ``screw_pitch`` couples rotation to translation (world units
    per radian) and is only meaningful for screw joints.
    """

    joint_type: JointType
    axis_origin: Vec3
    axis_direction: Vec3
    range: tuple[float, float]
    screw_pitch: float = DEFAULT_SCREW_PITCH

    def __post_init__(self):
        lo, hi = self.range
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ValueError("joint range must be finite")
        if lo > hi:
            raise ValueError(f"joint range must satisfy lo <= hi, got {self.range}")
        if self.joint_type is JointType.FIXED and (lo, hi) != (0.0, 0.0):
            raise ValueError("fixed joints must have range (0, 0)")
        if abs(self.axis_direction.norm() - 1.0) > UNIT_TOL:
            raise ValueError(
                f"axis_direction must be unit length, |d| = {self.axis_direction.norm():.8f}"
            )

    @staticmethod
    def fixed() -> "Joint":
        return Joint(JointType.FIXED, Vec3(0, 0, 0), Vec3(0, 0, 1), (0.0, 0.0))

    def displacement(self, q: float) -> float:
        lo, hi = self.range
        return lo + q * (hi - lo)


@dataclass(frozen=True)
class Aabb:
    min: Vec3
    max: Vec3

    def __post_init__(self):
        lo, hi = self.min.as_array(), self.max.as_array()
        if np.any(lo > hi):
            raise ValueError(f"Aabb min must be <= max componentwise: {self}")

    @staticmethod
    def from_center_halfextent(center, halfextent) -> "Aabb":
        c = np.asarray(center, dtype=float)
        h = np.asarray(halfextent, dtype=float)
        return Aabb(Vec3.from_array(c - h), Vec3.from_array(c + h))

    def center(self) -> np.ndarray:
        return 0.5 * (self.min.as_array() + self.max.as_array())

    def half_extent(self) -> np.ndarray:
        return 0.5 * (self.max.as_array() - self.min.as_array())

    def extent(self) -> np.ndarray:
        return self.max.as_array() - self.min.as_array()

    def longest_edge(self) -> float:
        return float(np.max(self.extent()))

    def volume(self) -> float:
        return float(np.prod(self.extent()))

    def corners(self) -> np.ndarray:
        """8 corners, shape (8, 3), in lexicographic (x, y, z) bit order."""
        lo, hi = self.min.as_array(), self.max.as_array()
        out = np.empty((8, 3), dtype=float)
        for i in range(8):
            out[i] = [hi[0] if i & 4 else lo[0],
                      hi[1] if i & 2 else lo[1],
                      hi[2] if i & 1 else lo[2]]
        return out

    @staticmethod
    def union(boxes: Iterable["Aabb"]) -> "Aabb":
        boxes = list(boxes)
        if not boxes:
            raise ValueError("union of no boxes")
        lo = np.min([b.min.as_array() for b in boxes], axis=0)
        hi = np.max([b.max.as_array() for b in boxes], axis=0)
        return Aabb(Vec3.from_array(lo), Vec3.from_array(hi))

    @staticmethod
    def of_points(points: np.ndarray) -> "Aabb":
        pts = np.asarray(points, dtype=float).reshape(-1, 3)
        return Aabb(Vec3.from_array(pts.min(axis=0)), Vec3.from_array(pts.max(axis=0)))


@dataclass(frozen=True)
class PartAbstraction:
    """One articulated part: box, semantic label, joint to parent."""

    id: int
    label: SemanticLabel
    bbox: Aabb
    joint: Joint
    parent: Optional[int] = None


@dataclass(frozen=True)
class ConnectivityGraph:
    """Rooted labeled tree of parts; edges point parent -> child."""

    nodes: tuple[tuple[int, SemanticLabel], ...]
    parent_of: dict

    def __init__(self, nodes, parent_of):
        object.__setattr__(self, "nodes", tuple((int(i), l) for i, l in nodes))
        object.__setattr__(self, "parent_of", dict(parent_of))

    def ids(self) -> list[int]:
        return sorted(i for i, _ in self.nodes)

    def label_of(self, part_id: int) -> SemanticLabel:
        for i, l in self.nodes:
            if i == part_id:
                return l
        raise KeyError(part_id)

    def roots(self) -> list[int]:
        return [i for i, _ in self.nodes if i not in self.parent_of]

    def children_of(self, part_id: int) -> list[int]:
        return sorted(c for c, p in self.parent_of.items() if p == part_id)

    def __len__(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True)
class ArticulatedAbstraction:
    """A whole object: parts plus their connectivity graph."""

    parts: tuple[PartAbstraction, ...]
    graph: ConnectivityGraph
    category: Optional[str] = None

    def __init__(self, parts, graph, category=None):
        object.__setattr__(self, "parts", tuple(parts))
        object.__setattr__(self, "graph", graph)
        object.__setattr__(self, "category", category)

    @staticmethod
    def from_parts(parts: Iterable[PartAbstraction], category: Optional[str] = None
                   ) -> "ArticulatedAbstraction":
        parts = tuple(parts)
        nodes = [(p.id, p.label) for p in parts]
        parent_of = {p.id: p.parent for p in parts if p.parent is not None}
        return ArticulatedAbstraction(parts, ConnectivityGraph(nodes, parent_of), category)

    def part_by_id(self, part_id: int) -> PartAbstraction:
        for p in self.parts:
            if p.id == part_id:
                return p
        raise KeyError(part_id)

    def sorted_parts(self) -> list[PartAbstraction]:
        return sorted(self.parts, key=lambda p: p.id)

    def union_bbox(self) -> Aabb:
        return Aabb.union(p.bbox for p in self.parts)


@dataclass(frozen=True)
class ArticulationState:
    """Normalized joint coordinates q in [0, 1] per part id.

    The actual displacement of a joint at q is lo + q * (hi - lo); fixed
    joints ignore q.
    """

    q: dict

    def __init__(self, q):
        q = {int(k): float(v) for k, v in dict(q).items()}
        for k, v in q.items():
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"q[{k}] = {v} outside [0, 1]")
        object.__setattr__(self, "q", q)

    @staticmethod
    def uniform(obj: ArticulatedAbstraction, q: float) -> "ArticulationState":
        return ArticulationState({p.id: q for p in obj.parts})

    def value(self, part_id: int) -> float:
        return self.q.get(part_id, 0.0)


@dataclass(frozen=True)
class RigidTransform:
    """Rotation + translation; rotation is a proper orthonormal 3x3 matrix."""

    rotation: np.ndarray
    translation: Vec3

    def __init__(self, rotation, translation):
        r = np.array(rotation, dtype=float).reshape(3, 3)
        r.setflags(write=False)
        object.__setattr__(self, "rotation", r)
        if not isinstance(translation, Vec3):
            translation = Vec3.from_array(translation)
        object.__setattr__(self, "translation", translation)

    @staticmethod
    def identity() -> "RigidTransform":
        return RigidTransform(np.eye(3), Vec3(0, 0, 0))

    def apply(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        single = pts.ndim == 1
        pts = pts.reshape(-1, 3)
        out = pts @ self.rotation.T + self.translation.as_array()
        return out[0] if single else out

    def compose(self, other: "RigidTransform") -> "RigidTransform":
        """self after other: (self . other)(p) = self(other(p))."""
        r = self.rotation @ other.rotation
        t = self.rotation @ other.translation.as_array() + self.translation.as_array()
        return RigidTransform(r, Vec3.from_array(t))

    def as_matrix(self) -> np.ndarray:
        m = np.eye(4)
        m[:3, :3] = self.rotation
        m[:3, 3] = self.translation.as_array()
        return m

    def is_rigid(self, tol: float = UNIT_TOL) -> bool:
        r = self.rotation
        return (np.abs(r.T @ r - np.eye(3)).max() <= tol
                and abs(np.linalg.det(r) - 1.0) <= tol)
