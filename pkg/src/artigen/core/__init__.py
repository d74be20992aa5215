from .types import (
    CATEGORIES,
    CONTINUOUS_RANGE,
    DEFAULT_SCREW_PITCH,
    JOINT_TYPES,
    MAX_PARTS,
    SEMANTIC_LABELS,
    Aabb,
    ArticulatedAbstraction,
    ArticulationState,
    ConnectivityGraph,
    Joint,
    JointType,
    PartAbstraction,
    RigidTransform,
    SemanticLabel,
    Vec3,
)
from .graph import adjacency_matrix, validate_graph
from .trimesh import TriMesh, box_mesh
from .kinematics import (
    box_corners_posed,
    joint_transform,
    normalize_object,
    pose_parts,
    posed_part_corners,
    resting_state,
    resting_union_bbox,
    sample_states,
)

__all__ = [
    "Aabb",
    "ArticulatedAbstraction",
    "ArticulationState",
    "ConnectivityGraph",
    "CATEGORIES",
    "CONTINUOUS_RANGE",
    "DEFAULT_SCREW_PITCH",
    "Joint",
    "JointType",
    "JOINT_TYPES",
    "MAX_PARTS",
    "PartAbstraction",
    "RigidTransform",
    "SemanticLabel",
    "SEMANTIC_LABELS",
    "Vec3",
    "TriMesh",
    "box_mesh",
    "adjacency_matrix",
    "validate_graph",
    "box_corners_posed",
    "joint_transform",
    "normalize_object",
    "pose_parts",
    "posed_part_corners",
    "resting_state",
    "resting_union_bbox",
    "sample_states",
]
