"""Patch feature grids: file IO and the synthetic extraction route.

A feature grid is 256 rows (16x16 patches, row-major from the top-left of
the image) by ``d_f`` columns. Real grids come from precomputed files
(d_f = 768); the synthetic route computes d_f = 32 features directly from
an object's resting-state boxes:

    col 0      coverage fraction of the patch by the projected object
    col 1      min normalized depth among parts covering the patch
    cols 2-7   per-label coverage fractions (semantic label order)
    cols 8-31  fixed random positional code seeded by the patch index

Patch (row, col) spans u in [-1 + col*h, -1 + (col+1)*h] and
v in [1 - (row+1)*h, 1 - row*h] with h = 2/16; index = row*16 + col.

Feature file layout (little-endian): magic "APFG", u32 version=1,
u32 n_patches=256, u32 d_f, n_patches*d_f float32 row-major, then
256 bytes of {0,1} mask.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from shapely.geometry import MultiPoint, box as patch_box
from shapely.ops import unary_union

from ..core import SEMANTIC_LABELS, ArticulatedAbstraction
from ..core.kinematics import posed_part_corners, resting_state
from ..errors import BadMagic, ShapeMismatch, TruncatedFile
from ..utils.validation import check_array
from .camera import CameraSpec, project_points

GRID_SIDE = 16
N_PATCHES = GRID_SIDE * GRID_SIDE
SYNTHETIC_DF = 32
POSITIONAL_DIMS = 24
MAGIC = b"APFG"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIII")


@dataclass(frozen=True)
class PatchFeatureGrid:
    """(256, d_f) float32 feature rows over the 16x16 patch grid."""

    features: np.ndarray
    d_f: int

    def __init__(self, features):
        feats = check_array(features, "features", shape=(N_PATCHES, None),
                            dtype=np.float32)
        feats = feats.copy()
        feats.setflags(write=False)
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "d_f", int(feats.shape[1]))

    @property
    def grid_shape(self) -> tuple:
        return (GRID_SIDE, GRID_SIDE)


@dataclass(frozen=True)
class ForegroundMask:
    """256 booleans over the patch grid; True marks object coverage."""

    values: np.ndarray

    def __init__(self, values):
        vals = np.asarray(values, dtype=bool).reshape(N_PATCHES).copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def count(self) -> int:
        return int(self.values.sum())


def save_feature_file(path, grid: PatchFeatureGrid, mask: ForegroundMask) -> None:
    header = _HEADER.pack(MAGIC, FORMAT_VERSION, N_PATCHES, grid.d_f)
    payload = np.ascontiguousarray(grid.features, dtype="<f4").tobytes()
    mask_bytes = mask.values.astype(np.uint8).tobytes()
    Path(path).write_bytes(header + payload + mask_bytes)


def load_feature_file(path) -> tuple:
    """Read a feature file; rejects any payload/header size disagreement."""
    data = Path(path).read_bytes()
    if len(data) < 4 or data[:4] != MAGIC:
        raise BadMagic(f"{path}: not a feature file")
    if len(data) < _HEADER.size:
        raise TruncatedFile(f"{path}: header cut short")
    _, version, n_patches, d_f = _HEADER.unpack_from(data)
    if version != FORMAT_VERSION:
        raise ShapeMismatch(f"{path}: unsupported version {version}")
    if n_patches != N_PATCHES or d_f == 0:
        raise ShapeMismatch(
            f"{path}: header declares {n_patches} patches x {d_f} dims")
    expected = _HEADER.size + n_patches * d_f * 4 + N_PATCHES
    if len(data) < expected:
        raise TruncatedFile(
            f"{path}: {len(data)} bytes, header promises {expected}")
    if len(data) > expected:
        raise ShapeMismatch(
            f"{path}: {len(data)} bytes, header promises {expected}")
    feats = np.frombuffer(data, dtype="<f4", count=n_patches * d_f,
                          offset=_HEADER.size).reshape(n_patches, d_f)
    mask_raw = np.frombuffer(data, dtype=np.uint8, count=N_PATCHES,
                             offset=expected - N_PATCHES)
    if not np.isin(mask_raw, (0, 1)).all():
        raise ShapeMismatch(f"{path}: mask bytes outside {{0, 1}}")
    return PatchFeatureGrid(feats), ForegroundMask(mask_raw.astype(bool))


def positional_code(index: int) -> np.ndarray:
    """Fixed 24-dim code for a patch index, identical across calls."""
    return np.random.default_rng(index).uniform(-1.0, 1.0, POSITIONAL_DIMS)


def _patch_bounds(index: int) -> tuple:
    h = 2.0 / GRID_SIDE
    row, col = divmod(index, GRID_SIDE)
    u0 = -1.0 + col * h
    v1 = 1.0 - row * h
    return u0, v1 - h, u0 + h, v1


def _projected_parts(obj: ArticulatedAbstraction, cam: CameraSpec) -> list:
    """Per part: (label, convex projected outline or None, depth extremes)."""
    if not obj.parts:  # no silhouette at all
        return []
    corners = posed_part_corners(obj, resting_state(obj))
    out = []
    for p in obj.sorted_parts():
        uvd = project_points(corners[p.id], cam)
        hull = MultiPoint(uvd[:, :2]).convex_hull
        poly = hull if hull.area > 0.0 else None
        out.append((p.label, poly,
                    float(uvd[:, 2].min()), float(uvd[:, 2].max())))
    return out


def synthetic_features(obj: ArticulatedAbstraction, cam: CameraSpec) -> tuple:
    """Deterministic stand-in for a learned feature grid.

    Coverage is exact polygon area: a projected part box is a convex
    polygon, so per-patch fractions come from polygon intersections, not
    rasterization.
    """
    parts = _projected_parts(obj, cam)
    visible = [(lbl, poly, near) for lbl, poly, near, _ in parts
               if poly is not None]
    # Depth normalization spans every corner of every visible part.
    d_lo = min((near for _, _, near, _ in parts), default=0.0)
    d_hi = max((far for _, _, _, far in parts), default=0.0)
    d_span = d_hi - d_lo

    h = 2.0 / GRID_SIDE
    patch_area = h * h
    feats = np.zeros((N_PATCHES, SYNTHETIC_DF), dtype=np.float64)
    mask = np.zeros(N_PATCHES, dtype=bool)
    for idx in range(N_PATCHES):
        cell = patch_box(*_patch_bounds(idx))
        covering = []  # (label, clipped polygon, depth) with positive area
        for lbl, poly, depth in visible:
            clipped = poly.intersection(cell)
            if clipped.area > 0.0:
                covering.append((lbl, clipped, depth))
        if covering:
            union = unary_union([c for _, c, _ in covering])
            feats[idx, 0] = union.area / patch_area
            near = min(d for _, _, d in covering)
            feats[idx, 1] = (near - d_lo) / d_span if d_span > 0.0 else 0.0
            for li, lbl in enumerate(SEMANTIC_LABELS):
                pieces = [c for l, c, _ in covering if l is lbl]
                if pieces:
                    feats[idx, 2 + li] = unary_union(pieces).area / patch_area
            mask[idx] = True
        feats[idx, 2 + len(SEMANTIC_LABELS):] = positional_code(idx)
    return PatchFeatureGrid(feats.astype(np.float32)), ForegroundMask(mask)


def mask_from_silhouette(obj: ArticulatedAbstraction, cam: CameraSpec) -> ForegroundMask:
    """Foreground = patches any part box projects onto with positive area."""
    visible = [poly for _, poly, _, _ in _projected_parts(obj, cam)
               if poly is not None]
    mask = np.zeros(N_PATCHES, dtype=bool)
    for idx in range(N_PATCHES):
        cell = patch_box(*_patch_bounds(idx))
        mask[idx] = any(poly.intersection(cell).area > 0.0 for poly in visible)
    return ForegroundMask(mask)
