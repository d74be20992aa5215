"""Input validation helpers shared across modules and estimators."""
from __future__ import annotations

import numpy as np


def check_array(a, name: str, shape=None, dtype=float) -> np.ndarray:
    """Coerce to an ndarray, enforcing finiteness and an optional shape.

    ``shape`` entries of ``None`` act as wildcards, e.g. (None, 3).
    """
    arr = np.asarray(a, dtype=dtype)
    if shape is not None:
        if arr.ndim != len(shape) or any(
            want is not None and got != want for got, want in zip(arr.shape, shape)
        ):
            raise ValueError(f"{name}: expected shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name}: contains non-finite values")
    return arr


def check_unit_vector(v, name: str, tol: float = 1e-6) -> np.ndarray:
    arr = check_array(v, name, shape=(3,))
    n = float(np.linalg.norm(arr))
    if abs(n - 1.0) > tol:
        raise ValueError(f"{name}: expected unit vector, |v| = {n:.8f}")
    return arr


def check_probability(p: float, name: str) -> float:
    p = float(p)
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"{name}: {p} outside [0, 1]")
    return p


def check_positive(x: float, name: str, strict: bool = True) -> float:
    x = float(x)
    if (x <= 0.0) if strict else (x < 0.0):
        raise ValueError(f"{name}: must be {'>' if strict else '>='} 0, got {x}")
    return x


def check_seed(seed) -> int:
    seed = int(seed)
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    return seed


def derive_seed(seed: int, *tokens) -> int:
    """Stable per-item seed from a base seed and arbitrary tokens.

    Python's builtin ``hash`` is salted per process, so use crc32 for a
    reproducible mix that is independent of scheduling or interpreter run.
    """
    import zlib

    h = check_seed(seed) & 0xFFFFFFFF
    for tok in tokens:
        h = zlib.crc32(repr(tok).encode("utf-8"), h)
    return int(h)
