"""View sampling and the orthographic projection used by synthetic features.

The camera orbits the object front (+x), z up: azimuth rotates horizontally
within [-45, 45] degrees, elevation tilts upward within [0, 90]. Projection
is orthographic onto a [-1, 1]^2 frame, which a normalized object fills
exactly when viewed head-on.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateProjection

AZIMUTH_RANGE = (-45.0, 45.0)
ELEVATION_RANGE = (0.0, 90.0)
DEFAULT_DISTANCE = 3.0


@dataclass(frozen=True)
class CameraSpec:
    azimuth: float
    elevation: float
    distance: float = DEFAULT_DISTANCE
    orthographic: bool = True

    def __post_init__(self):
        if not (AZIMUTH_RANGE[0] <= self.azimuth <= AZIMUTH_RANGE[1]):
            raise ValueError(f"azimuth {self.azimuth} outside {AZIMUTH_RANGE}")
        if not (ELEVATION_RANGE[0] <= self.elevation <= ELEVATION_RANGE[1]):
            raise ValueError(
                f"elevation {self.elevation} outside {ELEVATION_RANGE}")
        if self.distance <= 0:
            raise ValueError("distance must be positive")

    def frame(self) -> tuple:
        """(right, up, forward) unit vectors; forward points at the object."""
        az = math.radians(self.azimuth)
        el = math.radians(self.elevation)
        eye_dir = np.array([math.cos(el) * math.cos(az),
                            math.cos(el) * math.sin(az),
                            math.sin(el)])
        forward = -eye_dir
        world_up = np.array([0.0, 0.0, 1.0])
        right = np.cross(forward, world_up)
        n = np.linalg.norm(right)
        if n < 1e-8:  # top-down view: pick a fixed horizontal right axis
            right = np.array([0.0, 1.0, 0.0])
        else:
            right = right / n
        up = np.cross(right, forward)
        return right, up, forward


def sample_camera(seed: int) -> CameraSpec:
    rng = np.random.default_rng(seed)
    return CameraSpec(azimuth=float(rng.uniform(*AZIMUTH_RANGE)),
                      elevation=float(rng.uniform(*ELEVATION_RANGE)))


def project_points(points: np.ndarray, cam: CameraSpec) -> np.ndarray:
    """Orthographic projection to (u, v, depth) rows.

    Depth is distance from the camera plane; anything at or behind the
    camera is rejected.
    """
    right, up, forward = cam.frame()
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    u = pts @ right
    v = pts @ up
    depth = cam.distance + pts @ forward
    if (depth <= 0).any():
        raise DegenerateProjection("geometry at or behind the camera plane")
    return np.column_stack([u, v, depth])
