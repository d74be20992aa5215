"""Object records, the AOJ on-disk format, and dataset manifests.

AOJ is a UTF-8 JSON file describing one articulated object::

    {"id": str, "category": str, "parts": [
        {"id": int, "label": str, "bbox": {"center": [x,y,z],
         "halfextent": [x,y,z]}, "joint": {"type": str, "origin": [x,y,z],
         "direction": [x,y,z], "range": [lo,hi], "pitch"?: float},
         "parent": int|null, "mesh"?: str}]}

A manifest is a JSON list of ``{"object": path, "features": [paths],
"split": tag}`` with paths relative to the manifest file.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from ..core import (
    MAX_PARTS,
    Aabb,
    ArticulatedAbstraction,
    Joint,
    JointType,
    PartAbstraction,
    SemanticLabel,
    Vec3,
    normalize_object,
    validate_graph,
)
from ..errors import ArtigenError, BadRatios, ParseError, TooManyParts, ValidationError


@dataclass(frozen=True)
class ObjectRecord:
    """One dataset object: abstraction plus mesh references and provenance.

    Construct through :func:`make_record` or :func:`load_object`, which
    guarantee the object is validated and normalized.
    """

    obj: ArticulatedAbstraction
    meshes: dict = field(default_factory=dict)
    dataset: str = ""
    object_id: str = ""

    def __init__(self, obj, meshes=None, dataset="", object_id=""):
        object.__setattr__(self, "obj", obj)
        object.__setattr__(self, "meshes", dict(meshes or {}))
        object.__setattr__(self, "dataset", str(dataset))
        object.__setattr__(self, "object_id", str(object_id))


def make_record(obj: ArticulatedAbstraction, meshes=None, dataset: str = "",
                object_id: str = "") -> ObjectRecord:
    """Validate, normalize, and wrap an abstraction as a record."""
    if len(obj.parts) > MAX_PARTS:
        raise TooManyParts(f"{len(obj.parts)} parts exceed the cap of {MAX_PARTS}")
    validate_graph(obj.graph)
    return ObjectRecord(normalize_object(obj), meshes, dataset, object_id)


def _vec(d, key: str) -> Vec3:
    v = d[key]
    if not (isinstance(v, (list, tuple)) and len(v) == 3):
        raise ParseError(f"{key!r} must be a 3-vector, got {v!r}")
    return Vec3(float(v[0]), float(v[1]), float(v[2]))


def _parse_joint(d) -> Joint:
    try:
        jt = JointType(str(d["type"]).lower())
    except ValueError as e:
        raise ParseError(f"unknown joint type {d.get('type')!r}") from e
    lo, hi = (float(x) for x in d["range"])
    kwargs = {}
    if "pitch" in d:
        kwargs["screw_pitch"] = float(d["pitch"])
    try:
        return Joint(jt, _vec(d, "origin"), _vec(d, "direction"), (lo, hi), **kwargs)
    except ValueError as e:
        raise ParseError(f"bad joint: {e}") from e


def _parse_part(d) -> tuple[PartAbstraction, Optional[str]]:
    try:
        label = SemanticLabel(str(d["label"]).lower())
    except ValueError as e:
        raise ParseError(f"unknown label {d.get('label')!r}") from e
    bbox_d = d["bbox"]
    try:
        bbox = Aabb.from_center_halfextent(
            [float(x) for x in bbox_d["center"]],
            [float(x) for x in bbox_d["halfextent"]])
    except ValueError as e:
        raise ParseError(f"bad bbox: {e}") from e
    parent = d.get("parent")
    part = PartAbstraction(
        id=int(d["id"]), label=label, bbox=bbox, joint=_parse_joint(d["joint"]),
        parent=None if parent is None else int(parent))
    return part, d.get("mesh")


def object_from_dict(d: dict, dataset: str = "") -> ObjectRecord:
    """Build a validated, normalized record from parsed AOJ data."""
    try:
        object_id = str(d["id"])
        category = str(d["category"])
        raw_parts = d["parts"]
        if not isinstance(raw_parts, list) or not raw_parts:
            raise ParseError("'parts' must be a nonempty list")
        parsed = [_parse_part(p) for p in raw_parts]
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"malformed object: {e}") from e
    parts = [p for p, _ in parsed]
    meshes = {p.id: m for (p, m) in parsed if m is not None}
    obj = ArticulatedAbstraction.from_parts(parts, category=category)
    try:
        return make_record(obj, meshes, dataset=dataset, object_id=object_id)
    except ArtigenError as e:
        raise ValidationError(str(e), cause=e) from e


def object_to_dict(rec: ObjectRecord) -> dict:
    parts = []
    for p in rec.obj.sorted_parts():
        j = p.joint
        jd = {
            "type": j.joint_type.value,
            "origin": [j.axis_origin.x, j.axis_origin.y, j.axis_origin.z],
            "direction": [j.axis_direction.x, j.axis_direction.y,
                          j.axis_direction.z],
            "range": [j.range[0], j.range[1]],
        }
        if j.joint_type is JointType.SCREW:
            jd["pitch"] = j.screw_pitch
        pd = {
            "id": p.id,
            "label": p.label.value,
            "bbox": {"center": p.bbox.center().tolist(),
                     "halfextent": p.bbox.half_extent().tolist()},
            "joint": jd,
            "parent": p.parent,
        }
        if p.id in rec.meshes:
            pd["mesh"] = rec.meshes[p.id]
        parts.append(pd)
    return {"id": rec.object_id, "category": rec.obj.category, "parts": parts}


def load_object(path, dataset: str = "") -> ObjectRecord:
    path = Path(path)
    try:
        d = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ParseError(f"cannot read object file {path}: {e}") from e
    if not isinstance(d, dict):
        raise ParseError(f"object file {path} must hold a JSON object")
    return object_from_dict(d, dataset=dataset)


def save_object(rec: ObjectRecord, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(object_to_dict(rec), indent=2), encoding="utf-8")


# --- manifests ---------------------------------------------------------------

@dataclass(frozen=True)
class ManifestEntry:
    object: str
    features: tuple[str, ...] = ()
    split: str = "train"

    def __init__(self, object, features=(), split="train"):
        super().__setattr__("object", str(object))
        super().__setattr__("features", tuple(str(f) for f in features))
        super().__setattr__("split", str(split))


@dataclass(frozen=True)
class DatasetManifest:
    """Ordered list of dataset entries, with paths relative to ``root``."""

    entries: tuple[ManifestEntry, ...]
    root: Optional[Path] = None

    def __init__(self, entries, root=None):
        object.__setattr__(self, "entries", tuple(entries))
        object.__setattr__(self, "root", None if root is None else Path(root))

    def resolve(self, rel: str) -> Path:
        return Path(rel) if self.root is None else self.root / rel

    def __len__(self) -> int:
        return len(self.entries)


def load_manifest(path, check_files: bool = True) -> DatasetManifest:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
        entries = [ManifestEntry(e["object"], e.get("features", ()),
                                 e.get("split", "train")) for e in raw]
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as e:
        raise ParseError(f"cannot read manifest {path}: {e}") from e
    m = DatasetManifest(entries, root=path.parent)
    if check_files:
        for e in m.entries:
            for rel in (e.object, *e.features):
                p = m.resolve(rel)
                if not p.exists():
                    raise ValidationError(f"manifest references missing file {p}")
    return m


def save_manifest(m: DatasetManifest, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    raw = [{"object": e.object, "features": list(e.features), "split": e.split}
           for e in m.entries]
    path.write_text(json.dumps(raw, indent=2), encoding="utf-8")


def split_dataset(manifest: DatasetManifest, ratios: tuple[float, float],
                  seed: int) -> dict:
    """Partition entries into train/test by object id (the file stem).

    All entries sharing an object stay in one split, so feature views of a
    test object can never leak into training.
    """
    if len(ratios) != 2 or not math.isclose(sum(ratios), 1.0, abs_tol=1e-9):
        raise BadRatios(f"ratios must be two numbers summing to 1, got {ratios}")
    if any(r < 0 for r in ratios):
        raise BadRatios(f"ratios must be nonnegative, got {ratios}")
    ids = sorted({Path(e.object).stem for e in manifest.entries})
    rng = np.random.default_rng(seed)
    rng.shuffle(ids)
    n_train = int(round(ratios[0] * len(ids)))
    train_ids = set(ids[:n_train])
    out = {"train": [], "test": []}
    for e in manifest.entries:
        tag = "train" if Path(e.object).stem in train_ids else "test"
        out[tag].append(ManifestEntry(e.object, e.features, tag))
    return {k: DatasetManifest(v, root=manifest.root) for k, v in out.items()}
