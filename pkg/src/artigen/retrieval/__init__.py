from .assemble import (
    FIT_TOL,
    AssembleConfig,
    AssembledObject,
    AssembledPart,
    BoxFit,
    MeshSource,
    assemble,
    fit_mesh_to_box,
    match_part_meshes,
    select_candidate,
)
from .export import export_assembly
from .library import (
    PartLibrary,
    default_meshes,
    library_from_records,
    load_library,
)
from .meshio import (
    load_mesh,
    parse_obj,
    parse_stl,
    parse_stl_ascii,
    parse_stl_binary,
    save_obj,
)

__all__ = [
    "AssembleConfig",
    "AssembledObject",
    "AssembledPart",
    "BoxFit",
    "FIT_TOL",
    "MeshSource",
    "PartLibrary",
    "assemble",
    "default_meshes",
    "export_assembly",
    "fit_mesh_to_box",
    "library_from_records",
    "load_library",
    "load_mesh",
    "match_part_meshes",
    "parse_obj",
    "parse_stl",
    "parse_stl_ascii",
    "parse_stl_binary",
    "save_obj",
    "select_candidate",
]
