"""Forward kinematics: joint motion, tree-composed part poses, normalization.

Joint parameters are expressed in the world frame. A part's motion composes
with its parent's down the tree, so a handle riding an opening door moves
with the door.
"""
from __future__ import annotations

import numpy as np

from ..errors import DegenerateExtent, InvalidK, InvalidQ
from .graph import validate_graph
from .types import (
    Aabb,
    ArticulatedAbstraction,
    ArticulationState,
    Joint,
    JointType,
    PartAbstraction,
    RigidTransform,
    Vec3,
)


def _axis_rotation(direction: np.ndarray, angle: float) -> np.ndarray:
    """Rodrigues rotation matrix about a unit axis."""
    u = np.asarray(direction, dtype=float)
    k = np.array([[0.0, -u[2], u[1]],
                  [u[2], 0.0, -u[0]],
                  [-u[1], u[0], 0.0]])
    return np.eye(3) + np.sin(angle) * k + (1.0 - np.cos(angle)) * (k @ k)


def joint_transform(j: Joint, q: float) -> RigidTransform:
    """Rigid motion of a joint at normalized coordinate ``q`` in [0, 1].

    The displacement is d = lo + q * (hi - lo): a translation distance for
    prismatic joints, a rotation angle for revolute/continuous/screw. Screw
    joints couple the rotation with a translation of d * screw_pitch along
    the axis.
    """
    if not (0.0 <= q <= 1.0):
        raise InvalidQ(f"q = {q} outside [0, 1]")
    d = j.displacement(q)
    if j.joint_type is JointType.FIXED or d == 0.0:
        # zero displacement is the identity for every joint type
        return RigidTransform.identity()
    u = j.axis_direction.as_array()
    if j.joint_type is JointType.PRISMATIC:
        return RigidTransform(np.eye(3), Vec3.from_array(d * u))
    # rotational motion about the line (axis_origin, axis_direction)
    r = _axis_rotation(u, d)
    o = j.axis_origin.as_array()
    t = o - r @ o
    if j.joint_type is JointType.SCREW:
        t = t + d * j.screw_pitch * u
    return RigidTransform(r, Vec3.from_array(t))


def pose_parts(obj: ArticulatedAbstraction, s: ArticulationState) -> dict:
    """World pose per part id: pose(part) = pose(parent) . joint(part, q).

    The root pose is the identity; its own joint never moves the object.
    """
    validate_graph(obj.graph)
    poses: dict[int, RigidTransform] = {}
    root = obj.graph.roots()[0]
    poses[root] = RigidTransform.identity()
    pending = [p for p in obj.sorted_parts() if p.id != root]
    while pending:
        progressed = False
        remaining = []
        for part in pending:
            if part.parent in poses:
                local = joint_transform(part.joint, s.value(part.id))
                poses[part.id] = poses[part.parent].compose(local)
                progressed = True
            else:
                remaining.append(part)
        pending = remaining
        if pending and not progressed:  # unreachable after validate_graph
            raise RuntimeError("unresolvable parent ordering")
    return poses


def sample_states(obj: ArticulatedAbstraction, k: int) -> list[ArticulationState]:
    """k states with q = 0, 1/(k-1), ..., 1 applied identically to all joints."""
    if k < 2:
        raise InvalidK(f"k = {k} must be >= 2")
    return [ArticulationState.uniform(obj, i / (k - 1)) for i in range(k)]


def resting_state(obj: ArticulatedAbstraction) -> ArticulationState:
    return ArticulationState.uniform(obj, 0.0)


def box_corners_posed(bbox: Aabb, t: RigidTransform) -> np.ndarray:
    """The 8 box corners mapped through ``t``; shape (8, 3)."""
    return t.apply(bbox.corners())


def posed_part_corners(obj: ArticulatedAbstraction, s: ArticulationState) -> dict:
    """Corner sets of every part's box under the state's poses."""
    poses = pose_parts(obj, s)
    return {p.id: box_corners_posed(p.bbox, poses[p.id]) for p in obj.parts}


def resting_union_bbox(obj: ArticulatedAbstraction) -> Aabb:
    """Axis-aligned bounds of all part boxes posed at the resting state."""
    corners = posed_part_corners(obj, resting_state(obj))
    return Aabb.of_points(np.vstack(list(corners.values())))


def normalize_object(obj: ArticulatedAbstraction) -> ArticulatedAbstraction:
    """Uniformly rescale and recenter so the resting-state union bounding box
    sits at the origin with longest edge 2.

    Axis origins, prismatic ranges, and screw pitches rescale by the same
    factor; axis directions and rotational ranges are untouched, so the
    articulated motion is the similarity image of the original.
    """
    union = resting_union_bbox(obj)
    longest = union.longest_edge()
    if longest <= 0.0:
        raise DegenerateExtent("union bounding box has zero extent on all axes")
    scale = 2.0 / longest
    center = union.center()

    def remap_point(p: np.ndarray) -> np.ndarray:
        return scale * (p - center)

    parts = []
    for part in obj.parts:
        bbox = Aabb.from_center_halfextent(
            remap_point(part.bbox.center()), scale * part.bbox.half_extent()
        )
        j = part.joint
        lo, hi = j.range
        if j.joint_type is JointType.PRISMATIC:
            lo, hi = scale * lo, scale * hi
        joint = Joint(
            joint_type=j.joint_type,
            axis_origin=Vec3.from_array(remap_point(j.axis_origin.as_array())),
            axis_direction=j.axis_direction,
            range=(lo, hi),
            screw_pitch=scale * j.screw_pitch,
        )
        parts.append(PartAbstraction(part.id, part.label, bbox, joint, part.parent))
    return ArticulatedAbstraction(parts, obj.graph, obj.category)
