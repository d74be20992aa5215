"""Regenerate the test vectors shared between the service and the studio.

Two files under frontend/shared/ pin the client/server contract:

- graph_vectors.json — connectivity-graph payloads with the verdict a live
  service gives them through POST /v1/generate (200 = accepted, 4xx =
  rejected). The studio's client-side validator must reproduce every
  verdict.
- pose_vectors.json — world part poses (rotation matrix + translation) at
  a few articulation-slider positions, computed by the reference forward
  kinematics. The studio's viewer must land on the same poses.

Run from the repo root::

    python3 tools/make_shared_vectors.py
"""
from __future__ import annotations

import json
import math
import tempfile
from pathlib import Path

import torch
from fastapi.testclient import TestClient

from artigen.core import (
    Aabb,
    ArticulatedAbstraction,
    ArticulationState,
    Joint,
    JointType,
    PartAbstraction,
    SemanticLabel,
    Vec3,
    pose_parts,
)
from artigen.data import ObjectRecord, make_cabinets, object_to_dict
from artigen.diffusion import Denoiser, DenoiserConfig, save_checkpoint
from artigen.service import ServiceConfig, create_app

SHARED = Path(__file__).resolve().parent.parent / "frontend" / "shared"
Q_VALUES = (0.0, 0.25, 0.5, 1.0)


def nodes(*triples):
    return {"nodes": [{"id": i, "label": l, "parent": p} for i, l, p in triples]}


def chain(n: int) -> dict:
    triples = [(0, "base", None)]
    triples += [(i, "drawer", i - 1) for i in range(1, n)]
    return nodes(*triples)


def graph_cases() -> list[dict]:
    """Name + payload per case; the verdict comes from the live service."""
    cases = [
        ("single-base", nodes((0, "base", None))),
        ("base-door", nodes((0, "base", None), (1, "door", 0))),
        ("door-with-handle", nodes((0, "base", None), (1, "door", 0),
                                   (2, "handle", 1), (3, "drawer", 0))),
        ("uppercase-labels", nodes((0, "Base", None), (1, "DOOR", 0))),
        ("nested-base-label", nodes((0, "base", None), (1, "base", 0),
                                    (2, "knob", 1))),
        ("unsorted-ids", nodes((7, "drawer", 2), (2, "base", None),
                               (4, "tray", 2))),
        ("missing-parent-key", {"nodes": [{"id": 0, "label": "base"},
                                          {"id": 1, "label": "door",
                                           "parent": 0}]}),
        ("chain-32", chain(32)),
        ("chain-33", chain(33)),
        ("unknown-label", nodes((0, "base", None), (1, "wheel", 0))),
        ("duplicate-ids", nodes((0, "base", None), (1, "door", 0),
                                (1, "drawer", 0))),
        ("dangling-parent", nodes((0, "base", None), (1, "door", 9))),
        ("negative-parent", nodes((0, "base", None), (1, "door", -5))),
        ("two-roots", nodes((0, "base", None), (1, "base", None),
                            (2, "door", 0))),
        ("root-not-base", nodes((0, "door", None), (1, "handle", 0))),
        ("self-parent-only-node", nodes((0, "base", 0))),
        ("two-cycle", nodes((0, "base", 1), (1, "door", 0))),
        ("cycle-beside-root", nodes((0, "base", None), (1, "door", 2),
                                    (2, "drawer", 1))),
        ("empty-nodes", {"nodes": []}),
        ("no-nodes-key", {}),
        ("negative-id", nodes((-1, "base", None))),
        ("fractional-id", nodes((0, "base", None), (1.5, "door", 0))),
        ("integral-float-id", nodes((0, "base", None), (2.0, "door", 0))),
        ("numeric-string-id", nodes((0, "base", None), ("3", "door", 0))),
        ("fractional-string-id", nodes((0, "base", None), ("1.5", "door", 0))),
        ("boolean-id", nodes((0, "base", None), (True, "door", 0))),
        ("numeric-label", nodes((0, "base", None), (1, 7, 0))),
        ("null-label", nodes((0, "base", None), (1, None, 0))),
    ]
    return [{"name": name, "graph": graph} for name, graph in cases]


def fill_verdicts(cases: list[dict]) -> None:
    with tempfile.TemporaryDirectory() as tmp:
        root = Path(tmp)
        torch.manual_seed(0)
        save_checkpoint(root / "tiny.ckpt",
                        Denoiser(DenoiserConfig(layers=2, heads=4, hidden=32)))
        app = create_app(ServiceConfig(checkpoint=root / "tiny.ckpt",
                                       data_root=root,
                                       assets_dir=root / "assets",
                                       timesteps=4))
        client = TestClient(app)
        for case in cases:
            resp = client.post("/v1/generate", json={
                "graph": case["graph"], "num_samples": 1, "seed": 0})
            if resp.status_code not in (200, 400, 422):
                raise RuntimeError(f"{case['name']}: {resp.status_code}")
            case["accept"] = resp.status_code == 200


def five_joint_chain() -> ObjectRecord:
    """One part per joint type, including a fixed child under a moving one."""
    box = lambda cx, cy, cz, hx, hy, hz: Aabb(  # noqa: E731
        Vec3(cx - hx, cy - hy, cz - hz), Vec3(cx + hx, cy + hy, cz + hz))
    parts = [
        PartAbstraction(0, SemanticLabel.BASE, box(0, 0, 0, 0.5, 0.45, 0.55),
                        Joint(JointType.FIXED, Vec3(0, 0, 0),
                              Vec3(0, 0, 1.0), (0.0, 0.0))),
        PartAbstraction(1, SemanticLabel.DOOR,
                        box(0.475, 0.0, 0.0, 0.03, 0.42, 0.52),
                        Joint(JointType.REVOLUTE, Vec3(0.475, -0.42, 0.0),
                              Vec3(0.0, 0.0, 1.0), (0.0, math.pi / 2)),
                        parent=0),
        PartAbstraction(2, SemanticLabel.DRAWER,
                        box(0.0, 0.1, 0.3, 0.42, 0.3, 0.12),
                        Joint(JointType.PRISMATIC, Vec3(0.0, 0.1, 0.3),
                              Vec3(1.0, 0.0, 0.0), (0.0, 0.45)),
                        parent=0),
        PartAbstraction(3, SemanticLabel.KNOB,
                        box(0.5, 0.3, 0.1, 0.04, 0.04, 0.04),
                        Joint(JointType.CONTINUOUS, Vec3(0.5, 0.3, 0.1),
                              Vec3(1.0, 0.0, 0.0), (0.0, 2.0 * math.pi)),
                        parent=1),
        PartAbstraction(4, SemanticLabel.TRAY,
                        box(0.1, 0.1, 0.44, 0.3, 0.25, 0.03),
                        Joint(JointType.SCREW, Vec3(0.1, 0.1, 0.44),
                              Vec3(0.0, 1.0, 0.0), (0.0, 2.2),
                              screw_pitch=0.08),
                        parent=2),
        PartAbstraction(5, SemanticLabel.HANDLE,
                        box(0.52, 0.35, 0.0, 0.02, 0.02, 0.18),
                        Joint(JointType.FIXED, Vec3(0.52, 0.35, 0.0),
                              Vec3(0.0, 1.0, 0.0), (0.0, 0.0)),
                        parent=1),
    ]
    obj = ArticulatedAbstraction.from_parts(parts, category="Storage")
    return ObjectRecord(obj, object_id="five-joint-chain")


def pose_entries() -> list[dict]:
    records = [five_joint_chain(),
               ObjectRecord(make_cabinets(1, seed=9)[0].obj,
                            object_id="cabinet-9")]
    out = []
    for rec in records:
        poses = {}
        for q in Q_VALUES:
            state = ArticulationState.uniform(rec.obj, q)
            posed = pose_parts(rec.obj, state)
            poses[repr(q)] = {
                str(pid): {"rotation": tf.rotation.tolist(),
                           "translation": [tf.translation.x,
                                           tf.translation.y,
                                           tf.translation.z]}
                for pid, tf in posed.items()}
        out.append({"name": rec.object_id, "object": object_to_dict(rec),
                    "poses": poses})
    return out


def main() -> None:
    SHARED.mkdir(parents=True, exist_ok=True)
    cases = graph_cases()
    fill_verdicts(cases)
    (SHARED / "graph_vectors.json").write_text(
        json.dumps({"cases": cases}, indent=2) + "\n", encoding="utf-8")
    entries = pose_entries()
    (SHARED / "pose_vectors.json").write_text(
        json.dumps({"q_values": list(Q_VALUES), "objects": entries},
                   indent=2) + "\n", encoding="utf-8")
    accepted = sum(c["accept"] for c in cases)
    print(f"graph_vectors.json: {len(cases)} cases ({accepted} accepted)")
    print(f"pose_vectors.json: {len(entries)} objects x {len(Q_VALUES)} q")


if __name__ == "__main__":
    main()
