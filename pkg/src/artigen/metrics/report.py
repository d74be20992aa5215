"""Per-object evaluation reports and their CSV/JSON serialization."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional

from ..graphs.topology import graph_topology_accuracy
from .distance import DEFAULT_POINTS, DEFAULT_STATES, aor, eval_D

CSV_HEADER = ("id", "rs_giou", "as_giou", "rs_cdist", "as_cdist",
              "rs_cd", "as_cd", "aor", "graph_acc")


@dataclass(frozen=True)
class ReportConfig:
    k_states: int = DEFAULT_STATES
    n_points: int = DEFAULT_POINTS
    seed: int = 0
    scale_normalize: bool = True


@dataclass(frozen=True)
class MetricReport:
    """All six distance cells plus AOR and the graph-accuracy bit.

    Chamfer cells are None when either side lacks part meshes.
    """

    rs_giou: float
    as_giou: float
    rs_cdist: float
    as_cdist: float
    rs_cd: Optional[float]
    as_cd: Optional[float]
    aor: float
    graph_acc: int
    k_states: int = DEFAULT_STATES
    n_points: int = DEFAULT_POINTS


def _unpack(x):
    """Accept a bare abstraction or anything carrying one plus part meshes."""
    if hasattr(x, "abstraction"):
        return x.abstraction, dict(getattr(x, "part_meshes", {}) or {})
    return x, None


def report(gen, gt, cfg: ReportConfig = None, gen_meshes: dict = None,
           gt_meshes: dict = None) -> MetricReport:
    cfg = cfg or ReportConfig()
    gen_obj, m1 = _unpack(gen)
    gt_obj, m2 = _unpack(gt)
    m1 = gen_meshes if gen_meshes is not None else m1
    m2 = gt_meshes if gt_meshes is not None else m2
    common = dict(k_states=cfg.k_states, seed=cfg.seed,
                  scale_normalize=cfg.scale_normalize)
    cells = {}
    for kind in ("giou", "cdist"):
        cells[f"rs_{kind}"] = eval_D(gen_obj, gt_obj, kind=kind,
                                     rest_only=True, **common)
        cells[f"as_{kind}"] = eval_D(gen_obj, gt_obj, kind=kind, **common)
    if m1 and m2:
        cells["rs_cd"] = eval_D(gen_obj, gt_obj, kind="cd", rest_only=True,
                                n_points=cfg.n_points, meshes1=m1,
                                meshes2=m2, **common)
        cells["as_cd"] = eval_D(gen_obj, gt_obj, kind="cd",
                                n_points=cfg.n_points, meshes1=m1,
                                meshes2=m2, **common)
    else:
        cells["rs_cd"] = cells["as_cd"] = None
    return MetricReport(
        aor=aor(gen_obj),
        graph_acc=graph_topology_accuracy(gen_obj.graph, gt_obj.graph),
        k_states=cfg.k_states, n_points=cfg.n_points, **cells)


def _cell(v) -> str:
    return "" if v is None else repr(v)


def format_report_csv(rows: list) -> str:
    """rows: (object id, MetricReport) pairs, rendered in order."""
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(CSV_HEADER)
    for object_id, r in rows:
        w.writerow([object_id, _cell(r.rs_giou), _cell(r.as_giou),
                    _cell(r.rs_cdist), _cell(r.as_cdist), _cell(r.rs_cd),
                    _cell(r.as_cd), _cell(r.aor), r.graph_acc])
    return buf.getvalue()


def write_report_csv(rows: list, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        fh.write(format_report_csv(rows))


def write_report_json(rows: list, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = [{"id": object_id, **asdict(r)} for object_id, r in rows]
    path.write_text(json.dumps(payload, indent=2), encoding="utf-8")
