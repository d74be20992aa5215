"""Triangle-mesh file I/O: OBJ and STL readers, OBJ writer.

Only vertex positions and face connectivity are read; texture coordinates,
normals, materials, and object groups are ignored. Polygon faces fan-
triangulate from their first vertex. STL files may be ASCII or binary
(little-endian, 80-byte header); duplicated corner vertices are merged.
"""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from ..core import TriMesh
from ..errors import ParseError, TruncatedFile

_STL_HEADER = 84  # 80-byte comment + uint32 triangle count
_STL_RECORD = 50  # normal + 3 vertices (12 float32) + uint16 attribute


def _obj_vertex_index(token: str, n_vertices: int, line_no: int) -> int:
    """Resolve one face token (``7``, ``7/1``, ``7//3``, ``-1``) to 0-based."""
    head = token.split("/", 1)[0]
    try:
        raw = int(head)
    except ValueError as e:
        raise ParseError(f"OBJ line {line_no}: bad face index {token!r}") from e
    if raw == 0:
        raise ParseError(f"OBJ line {line_no}: face indices are 1-based")
    idx = n_vertices + raw if raw < 0 else raw - 1
    if not 0 <= idx < n_vertices:
        raise ParseError(f"OBJ line {line_no}: face index {raw} out of range")
    return idx


def parse_obj(text: str) -> TriMesh:
    vertices: list = []
    faces: list = []
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        tag, *rest = line.split()
        if tag == "v":
            if len(rest) < 3:
                raise ParseError(f"OBJ line {line_no}: vertex needs 3 coords")
            try:
                vertices.append([float(x) for x in rest[:3]])
            except ValueError as e:
                raise ParseError(f"OBJ line {line_no}: bad coordinate") from e
        elif tag == "f":
            if len(rest) < 3:
                raise ParseError(f"OBJ line {line_no}: face needs 3+ indices")
            idx = [_obj_vertex_index(t, len(vertices), line_no) for t in rest]
            for b, c in zip(idx[1:-1], idx[2:]):
                faces.append([idx[0], b, c])
        # vt/vn/vp/usemtl/mtllib/o/g/s/l carry no geometry we keep
    if not vertices:
        raise ParseError("OBJ file defines no vertices")
    return TriMesh(np.array(vertices), np.array(faces, dtype=np.int64
                                                ).reshape(-1, 3))


def _soup_to_mesh(corners: np.ndarray) -> TriMesh:
    """(3T, 3) corner rows -> mesh with exact-duplicate vertices merged."""
    vertices, inverse = np.unique(corners, axis=0, return_inverse=True)
    return TriMesh(vertices, inverse.reshape(-1, 3))


def parse_stl_ascii(text: str) -> TriMesh:
    corners = []
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        tokens = raw_line.split()
        if tokens and tokens[0].lower() == "vertex":
            if len(tokens) < 4:
                raise ParseError(f"STL line {line_no}: vertex needs 3 coords")
            try:
                corners.append([float(x) for x in tokens[1:4]])
            except ValueError as e:
                raise ParseError(f"STL line {line_no}: bad coordinate") from e
    if not corners:
        raise ParseError("ASCII STL contains no vertices")
    if len(corners) % 3:
        raise ParseError(f"ASCII STL vertex count {len(corners)} "
                         "is not a multiple of 3")
    return _soup_to_mesh(np.array(corners))


def parse_stl_binary(data: bytes) -> TriMesh:
    if len(data) < _STL_HEADER:
        raise TruncatedFile(f"binary STL header needs {_STL_HEADER} bytes, "
                            f"got {len(data)}")
    (count,) = struct.unpack_from("<I", data, 80)
    expected = _STL_HEADER + _STL_RECORD * count
    if len(data) < expected:
        raise TruncatedFile(f"binary STL with {count} triangles needs "
                            f"{expected} bytes, got {len(data)}")
    if count == 0:
        raise ParseError("binary STL contains no triangles")
    records = np.frombuffer(data, dtype=np.uint8, count=_STL_RECORD * count,
                            offset=_STL_HEADER).reshape(count, _STL_RECORD)
    floats = records[:, :48].copy().view("<f4").reshape(count, 4, 3)
    corners = floats[:, 1:, :].reshape(-1, 3).astype(float)
    if not np.isfinite(corners).all():
        raise ParseError("binary STL contains non-finite coordinates")
    return _soup_to_mesh(corners)


def _is_binary_stl(data: bytes) -> bool:
    # The reliable signal is the size equation; "solid" prefixes lie.
    if len(data) < _STL_HEADER:
        return False
    (count,) = struct.unpack_from("<I", data, 80)
    return len(data) == _STL_HEADER + _STL_RECORD * count


def parse_stl(data: bytes) -> TriMesh:
    if _is_binary_stl(data):
        return parse_stl_binary(data)
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        return parse_stl_binary(data)  # binary with a padded/odd size
    if text.lstrip().lower().startswith("solid"):
        return parse_stl_ascii(text)
    return parse_stl_binary(data)


def load_mesh(path) -> TriMesh:
    """Read a mesh file, dispatching on the .obj / .stl extension."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix not in (".obj", ".stl"):
        raise ParseError(f"unsupported mesh format {suffix!r} for {path}")
    try:
        data = path.read_bytes()
    except OSError as e:
        raise ParseError(f"cannot read mesh file {path}: {e}") from e
    if suffix == ".obj":
        try:
            return parse_obj(data.decode("utf-8"))
        except UnicodeDecodeError as e:
            raise ParseError(f"OBJ file {path} is not UTF-8 text") from e
    return parse_stl(data)


def save_obj(mesh: TriMesh, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"v {x:.9g} {y:.9g} {z:.9g}" for x, y, z in mesh.vertices]
    lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in mesh.faces]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
