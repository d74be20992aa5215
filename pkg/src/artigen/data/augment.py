"""Seeded data augmentation: handle swaps, flips, stacking, rescaling.

Every strategy returns new, revalidated, renormalized records and is
deterministic given the config seed. Per-record seeds are derived from the
object id so results do not depend on iteration order.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import (
    MAX_PARTS,
    Aabb,
    ArticulatedAbstraction,
    Joint,
    PartAbstraction,
    SemanticLabel,
    Vec3,
)
from ..core.types import ROTATIONAL_TYPES
from ..errors import TooManyParts
from ..utils.validation import check_probability, derive_seed
from .records import ObjectRecord, make_record

#: Labels whose subtrees the swap strategy exchanges between objects.
SWAPPABLE = frozenset({SemanticLabel.HANDLE, SemanticLabel.KNOB})

#: Categories the strategies are allowed to touch.
DEFAULT_WHITELIST = ("Table", "Storage")

MAX_PERTURB = 0.05


@dataclass(frozen=True)
class AugmentConfig:
    swap: bool = True
    flip: bool = True
    stack: bool = True
    scale: bool = True
    p_flip: float = 0.5
    p_scale: float = 0.5
    p_stack: float = 0.25
    seed: int = 0
    whitelist: tuple = DEFAULT_WHITELIST

    def __post_init__(self):
        for name in ("p_flip", "p_scale", "p_stack"):
            check_probability(getattr(self, name), name)
        object.__setattr__(self, "whitelist", tuple(self.whitelist))


def _subtree_ids(obj: ArticulatedAbstraction, root_id: int) -> list[int]:
    out, stack = [], [root_id]
    while stack:
        pid = stack.pop()
        out.append(pid)
        stack.extend(obj.graph.children_of(pid))
    return sorted(out)


def _translate(p: PartAbstraction, delta: np.ndarray, parent=...,
               new_id=None) -> PartAbstraction:
    j = p.joint
    moved = Joint(j.joint_type, Vec3.from_array(j.axis_origin.as_array() + delta),
                  j.axis_direction, j.range, j.screw_pitch)
    return PartAbstraction(
        id=p.id if new_id is None else new_id, label=p.label,
        bbox=Aabb.from_center_halfextent(p.bbox.center() + delta,
                                         p.bbox.half_extent()),
        joint=moved, parent=p.parent if parent is ... else parent)


def _has_swappable(rec: ObjectRecord, whitelist) -> bool:
    return (rec.obj.category in whitelist
            and any(p.label in SWAPPABLE for p in rec.obj.parts))


def _face_anchor_center(parent: PartAbstraction, old_center: np.ndarray,
                        new_half: np.ndarray, rng) -> np.ndarray:
    """Center for a transplanted handle: seated on the parent face nearest
    the old handle, tangentially perturbed by at most MAX_PERTURB."""
    cp, hp = parent.bbox.center(), parent.bbox.half_extent()
    rel = (old_center - cp) / np.maximum(hp, 1e-9)
    axis = int(np.argmax(np.abs(rel)))
    sign = 1.0 if rel[axis] >= 0 else -1.0
    center = old_center.copy()
    center[axis] = cp[axis] + sign * (hp[axis] + new_half[axis])
    for t in range(3):
        if t != axis:
            center[t] = old_center[t] + rng.uniform(-MAX_PERTURB, MAX_PERTURB)
    return center


def _transplant(dst: ObjectRecord, dst_handle: int, src: ObjectRecord,
                src_handle: int, rng) -> ObjectRecord:
    """Replace dst's handle subtree with src's, reseated on the same face."""
    removed = set(_subtree_ids(dst.obj, dst_handle))
    old = dst.obj.part_by_id(dst_handle)
    parent = dst.obj.part_by_id(old.parent)
    kept = [p for p in dst.obj.sorted_parts() if p.id not in removed]

    moving_ids = _subtree_ids(src.obj, src_handle)
    sub_root = src.obj.part_by_id(src_handle)
    new_center = _face_anchor_center(parent, old.bbox.center(),
                                     sub_root.bbox.half_extent(), rng)
    delta = new_center - sub_root.bbox.center()

    next_id = max(p.id for p in kept) + 1
    id_map = {pid: next_id + k for k, pid in enumerate(moving_ids)}
    grafted = []
    for pid in moving_ids:
        p = src.obj.part_by_id(pid)
        new_parent = parent.id if pid == src_handle else id_map[p.parent]
        grafted.append(_translate(p, delta, parent=new_parent,
                                  new_id=id_map[pid]))

    meshes = {p.id: dst.meshes[p.id] for p in kept if p.id in dst.meshes}
    meshes.update({id_map[pid]: src.meshes[pid] for pid in moving_ids
                   if pid in src.meshes})
    obj = ArticulatedAbstraction.from_parts(kept + grafted,
                                            category=dst.obj.category)
    return make_record(obj, meshes, dataset=dst.dataset,
                       object_id=dst.object_id)


def augment_swap_handles(records: list, cfg: AugmentConfig) -> list:
    """Exchange handle/knob subtrees between randomly paired records.

    Records without swappable parts (or outside the whitelist) pass through
    unchanged; an odd record left over after pairing also passes through.
    """
    rng = np.random.default_rng(derive_seed(cfg.seed, "swap"))
    eligible = [i for i, r in enumerate(records)
                if _has_swappable(r, cfg.whitelist)]
    order = list(eligible)
    rng.shuffle(order)
    out = list(records)
    for a, b in zip(order[::2], order[1::2]):
        ra, rb = records[a], records[b]
        ha = int(rng.choice(sorted(
            p.id for p in ra.obj.parts if p.label in SWAPPABLE)))
        hb = int(rng.choice(sorted(
            p.id for p in rb.obj.parts if p.label in SWAPPABLE)))
        out[a] = _transplant(ra, ha, rb, hb, rng)
        out[b] = _transplant(rb, hb, ra, ha, rng)
    return out


def augment_flip(rec: ObjectRecord) -> ObjectRecord:
    """Rotate the object 180 degrees about the x axis (upside down)."""
    parts = []
    for p in rec.obj.sorted_parts():
        j = p.joint
        c = p.bbox.center()
        o = j.axis_origin.as_array()
        u = j.axis_direction.as_array()
        parts.append(PartAbstraction(
            id=p.id, label=p.label,
            bbox=Aabb.from_center_halfextent([c[0], -c[1], -c[2]],
                                             p.bbox.half_extent()),
            joint=Joint(j.joint_type, Vec3(o[0], -o[1], -o[2]),
                        Vec3(u[0], -u[1], -u[2]), j.range, j.screw_pitch),
            parent=p.parent))
    obj = ArticulatedAbstraction.from_parts(parts, category=rec.obj.category)
    return make_record(obj, rec.meshes, rec.dataset, rec.object_id)


def augment_stack(a: ObjectRecord, b: ObjectRecord,
                  whitelist=DEFAULT_WHITELIST) -> ObjectRecord:
    """Stack b on top of a, merging b's Base into a's Base.

    b is translated so its union box sits touching a's from above; b's Base
    box is absorbed into a's Base and b's remaining parts are re-parented
    accordingly. Part count is len(a) + len(b) - 1.
    """
    for r in (a, b):
        if r.obj.category not in whitelist:
            raise ValueError(f"category {r.obj.category!r} not stackable")
    n = len(a.obj.parts) + len(b.obj.parts) - 1
    if n > MAX_PARTS:
        raise TooManyParts(f"stacking would produce {n} parts (cap {MAX_PARTS})")

    ua, ub = a.obj.union_bbox(), b.obj.union_bbox()
    delta = ua.center() - ub.center()
    delta[2] = ua.max.z - ub.min.z

    a_root = a.obj.graph.roots()[0]
    b_root = b.obj.graph.roots()[0]
    next_id = max(p.id for p in a.obj.parts) + 1
    b_ids = [p.id for p in b.obj.sorted_parts() if p.id != b_root]
    id_map = {pid: next_id + k for k, pid in enumerate(b_ids)}

    parts, meshes = [], dict(a.meshes)
    b_base_box = Aabb.from_center_halfextent(
        b.obj.part_by_id(b_root).bbox.center() + delta,
        b.obj.part_by_id(b_root).bbox.half_extent())
    for p in a.obj.sorted_parts():
        if p.id == a_root:
            p = PartAbstraction(p.id, p.label, Aabb.union([p.bbox, b_base_box]),
                                p.joint, p.parent)
        parts.append(p)
    for pid in b_ids:
        p = b.obj.part_by_id(pid)
        new_parent = a_root if p.parent == b_root else id_map[p.parent]
        parts.append(_translate(p, delta, parent=new_parent, new_id=id_map[pid]))
        if pid in b.meshes:
            meshes[id_map[pid]] = b.meshes[pid]

    obj = ArticulatedAbstraction.from_parts(parts, category=a.obj.category)
    return make_record(obj, meshes, dataset=a.dataset,
                       object_id=f"{a.object_id}+{b.object_id}")


def apply_scale(rec: ObjectRecord, factors) -> ObjectRecord:
    """Scale the object anisotropically, then renormalize.

    Rotational ranges are angles and stay fixed; translational magnitudes
    (prismatic ranges, screw pitch) scale with the axis direction's image.
    """
    s = np.asarray(factors, dtype=float).reshape(3)
    if np.all(s == 1.0):
        return rec
    parts = []
    for p in rec.obj.sorted_parts():
        j = p.joint
        su = s * j.axis_direction.as_array()
        n = float(np.linalg.norm(su))
        direction = Vec3.from_array(su / n) if n > 0 else Vec3(0, 0, 1)
        lo, hi = j.range
        if j.joint_type not in ROTATIONAL_TYPES:
            lo, hi = lo * n, hi * n
        parts.append(PartAbstraction(
            id=p.id, label=p.label,
            bbox=Aabb.from_center_halfextent(s * p.bbox.center(),
                                             s * p.bbox.half_extent()),
            joint=Joint(j.joint_type, Vec3.from_array(s * j.axis_origin.as_array()),
                        direction, (lo, hi), j.screw_pitch * n),
            parent=p.parent))
    obj = ArticulatedAbstraction.from_parts(parts, category=rec.obj.category)
    return make_record(obj, rec.meshes, rec.dataset, rec.object_id)


def augment_scale(rec: ObjectRecord, seed: int) -> ObjectRecord:
    rng = np.random.default_rng(derive_seed(seed, "scale", rec.object_id))
    return apply_scale(rec, rng.uniform(0.7, 1.3, size=3))


def augment_records(records: list, cfg: AugmentConfig) -> list:
    """One full augmentation pass: swap, then per-record flip/scale draws,
    then stacked combinations appended after the originals."""
    out = list(records)
    if cfg.swap:
        out = augment_swap_handles(out, cfg)
    result = []
    for rec in out:
        r = rec
        if rec.obj.category in cfg.whitelist:
            rng = np.random.default_rng(derive_seed(cfg.seed, "perrec",
                                                    rec.object_id))
            if cfg.flip and rng.uniform() < cfg.p_flip:
                r = augment_flip(r)
            if cfg.scale and rng.uniform() < cfg.p_scale:
                r = augment_scale(r, cfg.seed)
        result.append(r)
    if cfg.stack:
        rng = np.random.default_rng(derive_seed(cfg.seed, "stack"))
        idx = [i for i, r in enumerate(result)
               if r.obj.category in cfg.whitelist]
        rng.shuffle(idx)
        for a, b in zip(idx[::2], idx[1::2]):
            if rng.uniform() >= cfg.p_stack:
                continue
            ra, rb = result[a], result[b]
            if len(ra.obj.parts) + len(rb.obj.parts) - 1 <= MAX_PARTS:
                result.append(augment_stack(ra, rb, cfg.whitelist))
    return result
