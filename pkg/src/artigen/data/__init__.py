from .records import (
    DatasetManifest,
    ManifestEntry,
    ObjectRecord,
    load_manifest,
    load_object,
    make_record,
    object_from_dict,
    object_to_dict,
    save_manifest,
    save_object,
    split_dataset,
)
from .encoding import (
    MIN_HALF_EXTENT,
    N_ATTRS,
    N_DIMS,
    AttributeTensor,
    decode_attributes,
    encode_attributes,
)
from .augment import (
    AugmentConfig,
    apply_scale,
    augment_flip,
    augment_records,
    augment_scale,
    augment_stack,
    augment_swap_handles,
)
from .synthetic import make_cabinet, make_cabinets, write_dataset

__all__ = [
    "AttributeTensor",
    "AugmentConfig",
    "DatasetManifest",
    "ManifestEntry",
    "MIN_HALF_EXTENT",
    "N_ATTRS",
    "N_DIMS",
    "ObjectRecord",
    "apply_scale",
    "augment_flip",
    "augment_records",
    "augment_scale",
    "augment_stack",
    "augment_swap_handles",
    "decode_attributes",
    "encode_attributes",
    "load_manifest",
    "load_object",
    "make_cabinet",
    "make_cabinets",
    "make_record",
    "object_from_dict",
    "object_to_dict",
    "save_manifest",
    "save_object",
    "split_dataset",
    "write_dataset",
]
