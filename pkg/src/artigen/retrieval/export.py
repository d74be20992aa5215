"""Assembly export: URDF-style XML plus a sidecar object file.

Frame convention: the root link frame is the world frame; every other
link's frame sits at its joint's axis origin (resting pose). Mesh files
are written in link-local coordinates so each URDF joint is a pure
translation between frames with motion about the stored axis. Screw
joints export as revolute; their pitch survives in the sidecar, which
holds the full abstraction and per-part mesh references.
"""
from __future__ import annotations

import xml.etree.ElementTree as ET
from pathlib import Path

from ..core import JointType, TriMesh
from ..data import ObjectRecord, save_object
from .assemble import AssembledObject
from .meshio import save_obj

_URDF_TYPE = {
    JointType.FIXED: "fixed",
    JointType.REVOLUTE: "revolute",
    JointType.PRISMATIC: "prismatic",
    JointType.CONTINUOUS: "continuous",
    JointType.SCREW: "revolute",
}
_LIMITED = (JointType.REVOLUTE, JointType.PRISMATIC, JointType.SCREW)


def _fmt(values) -> str:
    return " ".join(f"{v:.9g}" for v in values)


def _frame_positions(assembled: AssembledObject) -> dict:
    roots = assembled.abstraction.graph.roots()
    out = {}
    for part in assembled.parts:
        if part.part_id in roots:
            out[part.part_id] = (0.0, 0.0, 0.0)
        else:
            o = part.joint.axis_origin
            out[part.part_id] = (o.x, o.y, o.z)
    return out


def _build_urdf(assembled: AssembledObject, name: str, mesh_files: dict,
                frames: dict) -> ET.Element:
    robot = ET.Element("robot", {"name": name})
    for part in assembled.parts:
        link = ET.SubElement(robot, "link", {"name": f"part_{part.part_id}"})
        visual = ET.SubElement(link, "visual")
        ET.SubElement(visual, "origin", {"xyz": "0 0 0", "rpy": "0 0 0"})
        geometry = ET.SubElement(visual, "geometry")
        ET.SubElement(geometry, "mesh",
                      {"filename": mesh_files[part.part_id]})
    for part in assembled.parts:
        if part.parent is None:
            continue
        joint = ET.SubElement(robot, "joint", {
            "name": f"joint_{part.part_id}",
            "type": _URDF_TYPE[part.joint.joint_type]})
        ET.SubElement(joint, "parent", {"link": f"part_{part.parent}"})
        ET.SubElement(joint, "child", {"link": f"part_{part.part_id}"})
        child, parent = frames[part.part_id], frames[part.parent]
        offset = tuple(c - p for c, p in zip(child, parent))
        ET.SubElement(joint, "origin", {"xyz": _fmt(offset), "rpy": "0 0 0"})
        if part.joint.joint_type is not JointType.FIXED:
            d = part.joint.axis_direction
            ET.SubElement(joint, "axis", {"xyz": _fmt((d.x, d.y, d.z))})
        if part.joint.joint_type in _LIMITED:
            lo, hi = part.joint.range
            ET.SubElement(joint, "limit", {
                "lower": f"{lo:.9g}", "upper": f"{hi:.9g}",
                "effort": "1", "velocity": "1"})
    return robot


def export_assembly(assembled: AssembledObject, out_dir, name: str = "object"
                    ) -> dict:
    """Write ``<name>.urdf``, ``<name>.aoj``, and one OBJ per part.

    Returns the written paths: {"urdf": Path, "aoj": Path,
    "meshes": {part_id: Path}}.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    frames = _frame_positions(assembled)
    mesh_files: dict = {}
    mesh_paths: dict = {}
    for part in assembled.parts:
        fname = f"{name}_part{part.part_id}.obj"
        fx, fy, fz = frames[part.part_id]
        local = TriMesh(part.mesh.vertices - (fx, fy, fz), part.mesh.faces)
        save_obj(local, out / fname)
        mesh_files[part.part_id] = fname
        mesh_paths[part.part_id] = out / fname

    robot = _build_urdf(assembled, name, mesh_files, frames)
    ET.indent(robot)
    urdf_path = out / f"{name}.urdf"
    ET.ElementTree(robot).write(urdf_path, encoding="utf-8",
                                xml_declaration=True)

    record = ObjectRecord(assembled.abstraction, meshes=mesh_files,
                          object_id=name)
    aoj_path = out / f"{name}.aoj"
    save_object(record, aoj_path)
    return {"urdf": urdf_path, "aoj": aoj_path, "meshes": mesh_paths}
