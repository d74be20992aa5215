"""Procedural cabinet generator for tests and smoke training runs.

Cabinets face +x, with z up: a Base box carrying 1-3 vertically stacked
units, each either a sliding drawer or a hinged door, each with a small
handle or knob on its front face. All geometry is deterministic in the seed.
"""
from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from ..core import (
    CONTINUOUS_RANGE,
    Aabb,
    ArticulatedAbstraction,
    Joint,
    JointType,
    PartAbstraction,
    SemanticLabel,
    Vec3,
)
from ..utils.validation import derive_seed
from .records import (
    DatasetManifest,
    ManifestEntry,
    ObjectRecord,
    make_record,
    save_manifest,
    save_object,
)


def _grip(rng, pid: int, parent: PartAbstraction, front_x: float,
          y: float, z: float) -> PartAbstraction:
    """Small handle or knob seated on a front face at (front_x, y, z)."""
    hh = 0.02
    kind = rng.uniform()
    if kind < 0.55:
        label, joint = SemanticLabel.HANDLE, Joint.fixed()
        half = (hh, 0.08, 0.02)
    elif kind < 0.85:
        label = SemanticLabel.KNOB
        half = (hh, 0.03, 0.03)
        joint = Joint(JointType.CONTINUOUS, Vec3(front_x + hh, y, z),
                      Vec3(1, 0, 0), CONTINUOUS_RANGE)
    else:
        label = SemanticLabel.KNOB
        half = (hh, 0.03, 0.03)
        joint = Joint(JointType.SCREW, Vec3(front_x + hh, y, z),
                      Vec3(1, 0, 0), (0.0, math.pi), screw_pitch=0.02)
    return PartAbstraction(
        id=pid, label=label,
        bbox=Aabb.from_center_halfextent([front_x + hh, y, z], half),
        joint=joint, parent=parent.id)


def make_cabinet(seed: int, object_id: str = "") -> ObjectRecord:
    rng = np.random.default_rng(seed)
    hx = rng.uniform(0.25, 0.45)
    hy = rng.uniform(0.3, 0.6)
    hz = rng.uniform(0.4, 0.8)
    base = PartAbstraction(
        id=0, label=SemanticLabel.BASE,
        bbox=Aabb.from_center_halfextent([0, 0, 0], [hx, hy, hz]),
        joint=Joint.fixed(), parent=None)
    parts = [base]
    n_units = int(rng.integers(1, 4))
    slab = 2 * hz / n_units
    pid = 1
    for i in range(n_units):
        z_mid = -hz + (i + 0.5) * slab
        sh = slab / 2 - 0.02
        if rng.uniform() < 0.5:
            drawer = PartAbstraction(
                id=pid, label=SemanticLabel.DRAWER,
                bbox=Aabb.from_center_halfextent(
                    [hx * 0.1, 0, z_mid], [hx * 0.85, hy - 0.05, sh]),
                joint=Joint(JointType.PRISMATIC, Vec3(hx * 0.1, 0, z_mid),
                            Vec3(1, 0, 0), (0.0, float(hx * 1.4))),
                parent=0)
            parts.append(drawer)
            parts.append(_grip(rng, pid + 1, drawer, hx * 0.95, 0.0, z_mid))
        else:
            t = 0.02
            side = 1.0 if rng.uniform() < 0.5 else -1.0
            door = PartAbstraction(
                id=pid, label=SemanticLabel.DOOR,
                bbox=Aabb.from_center_halfextent(
                    [hx + t, 0, z_mid], [t, hy * 0.95, sh]),
                joint=Joint(JointType.REVOLUTE,
                            Vec3(hx + t, side * hy * 0.95, z_mid),
                            Vec3(0, 0, 1), (0.0, math.pi / 2)),
                parent=0)
            parts.append(door)
            parts.append(_grip(rng, pid + 1, door, hx + 2 * t,
                               -side * hy * 0.8, z_mid))
        pid += 2
    obj = ArticulatedAbstraction.from_parts(parts, category="Storage")
    return make_record(obj, dataset="synthetic",
                       object_id=object_id or f"cab-{seed:08x}")


def make_cabinets(n: int, seed: int = 0) -> list:
    return [make_cabinet(derive_seed(seed, "cab", i), object_id=f"cab-{i:04d}")
            for i in range(n)]


def write_dataset(records: list, out_dir, split: str = "train"
                  ) -> DatasetManifest:
    """Save records as AOJ files plus a manifest.json next to them."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for rec in records:
        name = f"{rec.object_id}.aoj"
        save_object(rec, out_dir / name)
        entries.append(ManifestEntry(name, (), split))
    m = DatasetManifest(entries, root=out_dir)
    save_manifest(m, out_dir / "manifest.json")
    return m
