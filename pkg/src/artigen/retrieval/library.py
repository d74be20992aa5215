"""Part library: object records with mesh references plus default meshes."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Optional

from ..core import SemanticLabel, TriMesh
from ..data import ObjectRecord, load_manifest, load_object
from ..errors import NoDefaultMesh, ParseError
from .meshio import parse_obj


@lru_cache(maxsize=1)
def default_meshes() -> dict:
    """Packaged fallback mesh per semantic label (label -> TriMesh)."""
    root = resources.files("artigen.assets.meshes")
    out = {}
    for label in SemanticLabel:
        out[label] = parse_obj(
            (root / f"{label.value}.obj").read_text(encoding="utf-8"))
    return out


@dataclass(frozen=True)
class PartLibrary:
    """Ordered collection of retrievable objects.

    ``mesh_root`` anchors each record's relative mesh references; records
    without a mesh for a part fall back to ``defaults`` by semantic label.
    Entry order is the tie-breaking order for candidate selection.
    """

    entries: tuple
    mesh_root: Optional[Path]
    defaults: dict

    def __init__(self, entries, mesh_root=None, defaults=None):
        entries = tuple(entries)
        for e in entries:
            if not isinstance(e, ObjectRecord) or not e.obj.parts:
                raise ValueError("library entries must be nonempty records")
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "mesh_root",
                           None if mesh_root is None else Path(mesh_root))
        object.__setattr__(self, "defaults",
                           dict(default_meshes() if defaults is None
                                else defaults))
        by_category: dict = {}
        for e in entries:
            by_category.setdefault(e.obj.category, []).append(e)
        object.__setattr__(self, "_by_category",
                           {k: tuple(v) for k, v in by_category.items()})
        object.__setattr__(self, "_mesh_cache", {})

    def __len__(self) -> int:
        return len(self.entries)

    def by_category(self, category: Optional[str]) -> tuple:
        """Entries of one category; unknown categories yield ()."""
        return self._by_category.get(category, ())

    def _load_file(self, ref: str) -> TriMesh:
        path = Path(ref) if self.mesh_root is None else self.mesh_root / ref
        key = str(path)
        if key not in self._mesh_cache:
            from .meshio import load_mesh

            self._mesh_cache[key] = load_mesh(path)
        return self._mesh_cache[key]

    def mesh_for(self, record: ObjectRecord, part_id: int) -> TriMesh:
        """A part's referenced mesh, or the default for its label."""
        ref = record.meshes.get(part_id)
        if ref is not None:
            return self._load_file(ref)
        label = record.obj.part_by_id(part_id).label
        return self.default_for(label)

    def default_for(self, label: SemanticLabel) -> TriMesh:
        if label not in self.defaults:
            raise NoDefaultMesh(f"no default mesh for label {label.value!r}")
        return self.defaults[label]


def library_from_records(records, mesh_root=None) -> PartLibrary:
    if not records:
        raise ParseError("cannot build a library from zero records")
    return PartLibrary(records, mesh_root=mesh_root)


def load_library(path) -> PartLibrary:
    """Library from a directory of .aoj files or a dataset manifest."""
    path = Path(path)
    if path.is_dir():
        files = sorted(path.glob("*.aoj"))
        if not files:
            raise ParseError(f"library directory {path} holds no .aoj files")
        records = [load_object(p) for p in files]
        return PartLibrary(records, mesh_root=path)
    manifest = load_manifest(path)
    records = [load_object(manifest.resolve(e.object))
               for e in manifest.entries]
    return PartLibrary(records, mesh_root=path.parent)
