"""Image conditioning: patch feature grids, foreground masks, cameras."""
from .camera import (
    AZIMUTH_RANGE,
    DEFAULT_DISTANCE,
    ELEVATION_RANGE,
    CameraSpec,
    project_points,
    sample_camera,
)
from .features import (
    FORMAT_VERSION,
    GRID_SIDE,
    MAGIC,
    N_PATCHES,
    POSITIONAL_DIMS,
    SYNTHETIC_DF,
    ForegroundMask,
    PatchFeatureGrid,
    load_feature_file,
    mask_from_silhouette,
    positional_code,
    save_feature_file,
    synthetic_features,
)

__all__ = [
    "AZIMUTH_RANGE",
    "DEFAULT_DISTANCE",
    "ELEVATION_RANGE",
    "CameraSpec",
    "project_points",
    "sample_camera",
    "FORMAT_VERSION",
    "GRID_SIDE",
    "MAGIC",
    "N_PATCHES",
    "POSITIONAL_DIMS",
    "SYNTHETIC_DF",
    "ForegroundMask",
    "PatchFeatureGrid",
    "load_feature_file",
    "mask_from_silhouette",
    "positional_code",
    "save_feature_file",
    "synthetic_features",
]
