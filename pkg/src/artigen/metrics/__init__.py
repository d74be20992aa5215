from .assignment import Assignment, hungarian
from .boxes import (
    MIN_EXTENT,
    OrientedBox,
    d_cdist_pair,
    d_giou_pair,
    intersection_volume,
)
from .distance import (
    DEFAULT_POINTS,
    DEFAULT_STATES,
    DISTANCE_KINDS,
    aor,
    chamfer,
    d_cd_pair,
    eval_D,
)
from .report import (
    CSV_HEADER,
    MetricReport,
    ReportConfig,
    format_report_csv,
    report,
    write_report_csv,
    write_report_json,
)

__all__ = [
    "Assignment",
    "CSV_HEADER",
    "DEFAULT_POINTS",
    "DEFAULT_STATES",
    "DISTANCE_KINDS",
    "MetricReport",
    "MIN_EXTENT",
    "OrientedBox",
    "ReportConfig",
    "aor",
    "chamfer",
    "d_cd_pair",
    "d_cdist_pair",
    "d_giou_pair",
    "eval_D",
    "format_report_csv",
    "hungarian",
    "intersection_volume",
    "report",
    "write_report_csv",
    "write_report_json",
]
