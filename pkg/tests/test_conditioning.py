"""Camera sampling, synthetic feature grids, and feature-file IO."""
import dataclasses
import struct

import numpy as np
import pytest
from scipy.spatial import ConvexHull, QhullError

from artigen.conditioning import (
    AZIMUTH_RANGE,
    ELEVATION_RANGE,
    FORMAT_VERSION,
    GRID_SIDE,
    MAGIC,
    N_PATCHES,
    SYNTHETIC_DF,
    CameraSpec,
    ForegroundMask,
    PatchFeatureGrid,
    load_feature_file,
    mask_from_silhouette,
    positional_code,
    project_points,
    sample_camera,
    save_feature_file,
    synthetic_features,
)
from artigen.core import (
    SEMANTIC_LABELS,
    Aabb,
    ArticulatedAbstraction,
    Joint,
    PartAbstraction,
    SemanticLabel,
)
from artigen.core.kinematics import posed_part_corners, resting_state
from artigen.data import make_cabinets
from artigen.errors import BadMagic, DegenerateProjection, ShapeMismatch, TruncatedFile

HEAD_ON = CameraSpec(azimuth=0.0, elevation=0.0)


def single_box(half, center=(0.0, 0.0, 0.0), label=SemanticLabel.BASE):
    part = PartAbstraction(
        id=0, label=label,
        bbox=Aabb.from_center_halfextent(center, half), joint=Joint.fixed())
    return ArticulatedAbstraction.from_parts([part])


def box_pair(spec_a, spec_b):
    """Two boxes (center, half, label); the second is a child of the first."""
    (ca, ha, la), (cb, hb, lb) = spec_a, spec_b
    parts = [
        PartAbstraction(0, la, Aabb.from_center_halfextent(ca, ha), Joint.fixed()),
        PartAbstraction(1, lb, Aabb.from_center_halfextent(cb, hb),
                        Joint.fixed(), parent=0),
    ]
    return ArticulatedAbstraction.from_parts(parts)


# --- camera -------------------------------------------------------------


def test_camera_bounds_enforced():
    with pytest.raises(ValueError):
        CameraSpec(azimuth=50.0, elevation=10.0)
    with pytest.raises(ValueError):
        CameraSpec(azimuth=0.0, elevation=-1.0)
    with pytest.raises(ValueError):
        CameraSpec(azimuth=0.0, elevation=0.0, distance=0.0)


def test_camera_frame_orthonormal():
    for az, el in [(0, 0), (-45, 0), (45, 90), (13.0, 77.0)]:
        right, up, forward = CameraSpec(azimuth=az, elevation=el).frame()
        basis = np.stack([right, up, forward])
        assert np.allclose(basis @ basis.T, np.eye(3), atol=1e-12)


def test_sample_camera_deterministic():
    assert sample_camera(7) == sample_camera(7)
    assert sample_camera(7) != sample_camera(8)


def test_sample_camera_distribution():
    cams = [sample_camera(s) for s in range(10_000)]
    az = np.array([c.azimuth for c in cams])
    el = np.array([c.elevation for c in cams])
    assert az.min() >= AZIMUTH_RANGE[0] and az.max() <= AZIMUTH_RANGE[1]
    assert el.min() >= ELEVATION_RANGE[0] and el.max() <= ELEVATION_RANGE[1]
    assert abs(el.mean() - 45.0) < 2.0
    assert abs(az.mean() - 0.0) < 2.0


def test_head_on_projection_axes():
    # Front view: u is world y, v is world z, depth is distance minus x.
    uvd = project_points(np.array([[0.2, 0.3, 0.5]]), HEAD_ON)
    assert np.allclose(uvd, [[0.3, 0.5, 2.8]], atol=1e-12)


def test_projection_rejects_geometry_behind_camera():
    with pytest.raises(DegenerateProjection):
        project_points(np.array([[4.0, 0.0, 0.0]]), HEAD_ON)
    with pytest.raises(DegenerateProjection):
        synthetic_features(single_box((1.0, 1.0, 1.0), center=(4.0, 0, 0)),
                           HEAD_ON)


# --- feature file IO ------------------------------------------------------


def random_grid(d_f, seed=0):
    rng = np.random.default_rng(seed)
    grid = PatchFeatureGrid(
        rng.standard_normal((N_PATCHES, d_f)).astype(np.float32))
    mask = ForegroundMask(rng.integers(0, 2, N_PATCHES).astype(bool))
    return grid, mask


def test_feature_file_round_trip_bit_identical(tmp_path):
    for d_f in (32, 768):
        grid, mask = random_grid(d_f, seed=d_f)
        path = tmp_path / f"feat{d_f}.apfg"
        save_feature_file(path, grid, mask)
        loaded_grid, loaded_mask = load_feature_file(path)
        assert loaded_grid.d_f == d_f
        assert loaded_grid.features.tobytes() == grid.features.tobytes()
        assert np.array_equal(loaded_mask.values, mask.values)


def make_file_bytes(n_patches=N_PATCHES, d_f=4, version=FORMAT_VERSION,
                    magic=MAGIC):
    header = struct.pack("<4sIII", magic, version, n_patches, d_f)
    payload = np.zeros(n_patches * d_f, dtype="<f4").tobytes()
    return header + payload + bytes(N_PATCHES)


def test_loader_rejects_bad_magic(tmp_path):
    path = tmp_path / "bad.apfg"
    path.write_bytes(make_file_bytes(magic=b"NOPE"))
    with pytest.raises(BadMagic):
        load_feature_file(path)
    path.write_bytes(b"AP")
    with pytest.raises(BadMagic):
        load_feature_file(path)


def test_loader_rejects_wrong_patch_count(tmp_path):
    path = tmp_path / "n255.apfg"
    path.write_bytes(make_file_bytes(n_patches=255))
    with pytest.raises(ShapeMismatch):
        load_feature_file(path)


def test_loader_rejects_unknown_version(tmp_path):
    path = tmp_path / "v2.apfg"
    path.write_bytes(make_file_bytes(version=2))
    with pytest.raises(ShapeMismatch):
        load_feature_file(path)


def test_loader_rejects_truncation_and_trailing_bytes(tmp_path):
    good = make_file_bytes()
    path = tmp_path / "cut.apfg"
    path.write_bytes(good[:-100])
    with pytest.raises(TruncatedFile):
        load_feature_file(path)
    path.write_bytes(good[:10])
    with pytest.raises(TruncatedFile):
        load_feature_file(path)
    path.write_bytes(good + b"\x00")
    with pytest.raises(ShapeMismatch):
        load_feature_file(path)


def test_loader_rejects_nonbinary_mask_bytes(tmp_path):
    data = make_file_bytes()
    path = tmp_path / "mask7.apfg"
    path.write_bytes(data[:-1] + b"\x07")
    with pytest.raises(ShapeMismatch):
        load_feature_file(path)


# --- synthetic features ---------------------------------------------------


def test_positional_code_fixed_per_index():
    assert np.array_equal(positional_code(5), positional_code(5))
    assert not np.array_equal(positional_code(5), positional_code(6))


def test_empty_patch_rows_zero_mask_false():
    # Quarter-size cube leaves the frame corners empty.
    grid, mask = synthetic_features(single_box((0.25, 0.25, 0.25)), HEAD_ON)
    assert grid.d_f == SYNTHETIC_DF
    corner = 0
    assert not mask.values[corner]
    assert np.all(grid.features[corner, :8] == 0.0)
    assert np.array_equal(grid.features[corner, 8:],
                          positional_code(corner).astype(np.float32))


def test_frame_filling_object_masks_everything():
    grid, mask = synthetic_features(single_box((1.0, 1.0, 1.0)), HEAD_ON)
    assert mask.count() == N_PATCHES
    assert np.allclose(grid.features[:, 0], 1.0, atol=1e-12)


def test_synthetic_features_bit_identical():
    obj = make_cabinets(1, seed=3)[0].obj
    cam = sample_camera(11)
    grid_a, mask_a = synthetic_features(obj, cam)
    grid_b, mask_b = synthetic_features(obj, cam)
    assert grid_a.features.tobytes() == grid_b.features.tobytes()
    assert np.array_equal(mask_a.values, mask_b.values)


def test_feature_grids_view_sensitive():
    obj = make_cabinets(1, seed=5)[0].obj
    grid_a, _ = synthetic_features(obj, CameraSpec(azimuth=-20.0, elevation=30.0))
    grid_b, _ = synthetic_features(obj, CameraSpec(azimuth=20.0, elevation=30.0))
    assert np.linalg.norm(grid_a.features - grid_b.features) > 0.0


def test_label_swap_changes_only_histogram_slots():
    def build(label):
        return box_pair(
            ((0.0, 0.0, -0.5), (0.9, 0.9, 0.4), SemanticLabel.BASE),
            ((0.0, 0.0, 0.5), (0.7, 0.7, 0.4), label))

    grid_a, mask_a = synthetic_features(build(SemanticLabel.DRAWER), HEAD_ON)
    grid_b, mask_b = synthetic_features(build(SemanticLabel.DOOR), HEAD_ON)
    assert np.array_equal(mask_a.values, mask_b.values)
    non_label = np.r_[0:2, 8:SYNTHETIC_DF]
    assert np.array_equal(grid_a.features[:, non_label],
                          grid_b.features[:, non_label])
    assert not np.array_equal(grid_a.features[:, 2:8], grid_b.features[:, 2:8])


def test_coverage_fractions_match_analytic_areas():
    # Box spanning [-0.52, 0.52] in u and v: interior patches are fully
    # covered, the patch column left of -0.5 is covered on a 0.02-wide strip.
    grid, mask = synthetic_features(single_box((0.52, 0.52, 0.52)), HEAD_ON)
    feats = grid.features.reshape(GRID_SIDE, GRID_SIDE, SYNTHETIC_DF)
    assert feats[8, 8, 0] == pytest.approx(1.0, abs=1e-7)
    assert feats[8, 3, 0] == pytest.approx(0.02 / 0.125, abs=1e-7)
    assert feats[3, 8, 0] == pytest.approx(0.02 / 0.125, abs=1e-7)
    assert feats[3, 3, 0] == pytest.approx((0.02 / 0.125) ** 2, abs=1e-7)
    assert mask.values.reshape(GRID_SIDE, GRID_SIDE)[3, 3]
    assert not mask.values.reshape(GRID_SIDE, GRID_SIDE)[2, 8]


def test_depth_and_label_slots_per_part():
    # Base box sits nearer the camera (+x) than the drawer box; each
    # occupies one side of the frame in u = world y.
    obj = box_pair(
        ((0.5, -0.5, 0.0), (0.25, 0.25, 0.25), SemanticLabel.BASE),
        ((-0.5, 0.5, 0.0), (0.25, 0.25, 0.25), SemanticLabel.DRAWER))
    grid, _ = synthetic_features(obj, HEAD_ON)
    feats = grid.features.reshape(GRID_SIDE, GRID_SIDE, SYNTHETIC_DF)
    base_slot = 2 + SEMANTIC_LABELS.index(SemanticLabel.BASE)
    drawer_slot = 2 + SEMANTIC_LABELS.index(SemanticLabel.DRAWER)
    near = feats[7, 4]   # u ~ -0.45: base box only
    far = feats[7, 11]   # u ~ +0.45: drawer box only
    assert near[0] == pytest.approx(1.0, abs=1e-7)
    assert near[1] == pytest.approx(0.0, abs=1e-7)
    assert near[base_slot] == pytest.approx(1.0, abs=1e-7)
    assert near[drawer_slot] == 0.0
    # Depth normalized over scene corner depths [2.25, 3.75].
    assert far[1] == pytest.approx((3.25 - 2.25) / 1.5, abs=1e-6)
    assert far[drawer_slot] == pytest.approx(1.0, abs=1e-7)
    assert far[base_slot] == 0.0


# --- foreground masks ------------------------------------------------------


def raster_foreground(obj, cam, res=224):
    """Independent oracle: pixel-center rasterization, patch = any pixel.

    Inside tests use strict half-plane margins so every oracle-true patch
    has strictly positive overlap area.
    """
    corners = posed_part_corners(obj, resting_state(obj))
    h = 2.0 / res
    us = -1.0 + (np.arange(res) + 0.5) * h
    vs = 1.0 - (np.arange(res) + 0.5) * h
    uu, vv = np.meshgrid(us, vs)
    pts = np.column_stack([uu.ravel(), vv.ravel()])
    covered = np.zeros(res * res, dtype=bool)
    for p in obj.sorted_parts():
        uvd = project_points(corners[p.id], cam)
        try:
            hull = ConvexHull(uvd[:, :2])
        except QhullError:
            continue  # collinear projection: zero area
        planes, offs = hull.equations[:, :2], hull.equations[:, 2]
        covered |= ((pts @ planes.T + offs) < -1e-9).all(axis=1)
    side = res // GRID_SIDE
    blocks = covered.reshape(GRID_SIDE, side, GRID_SIDE, side)
    return blocks.any(axis=(1, 3)).ravel()


def test_mask_no_parts_all_false():
    empty = ArticulatedAbstraction.from_parts(())
    assert mask_from_silhouette(empty, HEAD_ON).count() == 0


def test_mask_matches_synthetic_component():
    for i, rec in enumerate(make_cabinets(5, seed=9)):
        cam = sample_camera(40 + i)
        _, mask = synthetic_features(rec.obj, cam)
        assert np.array_equal(
            mask_from_silhouette(rec.obj, cam).values, mask.values)


def test_centered_cube_mask_matches_raster_oracle():
    for half in (0.5, 0.52, 0.47):
        obj = single_box((half, half, half))
        mask = mask_from_silhouette(obj, HEAD_ON).values
        oracle = raster_foreground(obj, HEAD_ON)
        assert abs(int(mask.sum()) - int(oracle.sum())) <= 16
        assert np.logical_xor(mask, oracle).sum() <= 16


def test_half_frame_cube_covers_central_64_patches():
    mask = mask_from_silhouette(single_box((0.5, 0.5, 0.5)), HEAD_ON)
    grid = mask.values.reshape(GRID_SIDE, GRID_SIDE)
    assert mask.count() == 64
    assert grid[4:12, 4:12].all()


def test_raster_oracle_is_subset_of_exact_mask():
    # A pixel center strictly inside a projection implies positive overlap
    # area, so the exact rule must cover every oracle patch.
    for i, rec in enumerate(make_cabinets(6, seed=21)):
        cam = sample_camera(100 + i)
        mask = mask_from_silhouette(rec.obj, cam).values
        oracle = raster_foreground(rec.obj, cam)
        assert not np.any(oracle & ~mask)
        assert np.logical_xor(mask, oracle).sum() <= 16
