"""HTTP facade: graph prediction, generation, evaluation, retrieval.

Error mapping: malformed payloads are 400, missing referenced artifacts are
404, operating without a loaded checkpoint/library is 409, semantically
invalid domain inputs (graphs, pins, categories) are 422, and upstream
predictor failures surface as 502 (unreachable/auth) or 422 (unparseable).
"""
from __future__ import annotations

import io
import zipfile
from dataclasses import asdict, replace
from pathlib import Path
from typing import Optional

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response

from .. import __version__
from ..conditioning import load_feature_file
from ..core import (
    CATEGORIES,
    MAX_PARTS,
    ArticulatedAbstraction,
    ConnectivityGraph,
    SemanticLabel,
    validate_graph,
)
from ..data import ObjectRecord, load_object, object_from_dict, object_to_dict
from ..data.encoding import N_ATTRS, N_DIMS, decode_attributes
from ..diffusion import ConditioningBundle, GraphMask, PinSet, SamplerConfig, sample
from ..errors import (
    ArtigenError,
    AuthFailed,
    GraphValidationError,
    NotSyntheticLayout,
    ParseError,
    RetriesExhausted,
    Unreachable,
    ValidationError,
)
from ..graphs import predict_stub, predict_vlm
from ..metrics import ReportConfig, report
from ..retrieval import AssembleConfig, assemble, export_assembly, load_mesh
from .schemas import (
    EvaluateRequest,
    EvaluateResponse,
    GenerateRequest,
    GenerateResponse,
    GraphModel,
    GraphNodeModel,
    HealthResponse,
    PredictGraphRequest,
    PredictGraphResponse,
    ProvenanceModel,
    RetrieveRequest,
    RetrieveResponse,
)
from .state import ServiceConfig, ServiceState, stable_asset_id


def _graph_from_model(model: GraphModel) -> ConnectivityGraph:
    if len(model.nodes) > MAX_PARTS:
        raise HTTPException(422, f"graph has {len(model.nodes)} nodes; "
                                 f"the cap is {MAX_PARTS}")
    nodes = []
    for n in model.nodes:
        try:
            label = SemanticLabel(n.label.lower())
        except ValueError:
            raise HTTPException(422, f"unknown semantic label {n.label!r}")
        nodes.append((n.id, label))
    parent_of = {n.id: n.parent for n in model.nodes if n.parent is not None}
    graph = ConnectivityGraph(nodes, parent_of)
    try:
        validate_graph(graph)
    except GraphValidationError as e:
        raise HTTPException(422, f"invalid graph: {e}")
    return graph


def _graph_to_model(graph: ConnectivityGraph) -> GraphModel:
    return GraphModel(nodes=[
        GraphNodeModel(id=pid, label=label.value,
                       parent=graph.parent_of.get(pid))
        for pid, label in graph.nodes])


def _pins_from_request(req: GenerateRequest, graph: ConnectivityGraph
                       ) -> Optional[PinSet]:
    if not req.pins:
        return None
    slots = {pid: i for i, pid in enumerate(graph.ids())}
    mask = np.zeros((MAX_PARTS, N_ATTRS), dtype=bool)
    values = np.zeros((MAX_PARTS, N_ATTRS, N_DIMS))
    for pin in req.pins:
        if pin.part_id not in slots:
            raise HTTPException(422, f"pinned part {pin.part_id} "
                                     "is not in the graph")
        if not all(np.isfinite(pin.values)):
            raise HTTPException(422, "pin values must be finite")
        mask[slots[pin.part_id], pin.row] = True
        values[slots[pin.part_id], pin.row] = pin.values
    return PinSet(mask, values)


def _restore_pinned_bbox(obj: ArticulatedAbstraction, obj_dict: dict,
                         req: GenerateRequest) -> None:
    """Serialize pinned bbox rows with the exact pinned numbers.

    A box pinned as (center, halfextent) is stored internally as
    (min, max) = (c-h, c+h); re-deriving the center costs one float
    rounding. Writing the request values back is lossless because the
    wire format's canonical fields are center/halfextent and they
    reconstruct the identical box. Rows the decoder altered (degenerate
    extents get clamped) are left as decoded.
    """
    parts = {p["id"]: p for p in obj_dict["parts"]}
    for pin in req.pins:
        if pin.row != 0 or pin.part_id not in parts:
            continue
        c = np.asarray(pin.values[:3], dtype=float)
        h = np.asarray(pin.values[3:], dtype=float)
        actual = obj.part_by_id(pin.part_id).bbox
        if (np.array_equal(actual.min.as_array(), c - h)
                and np.array_equal(actual.max.as_array(), c + h)):
            parts[pin.part_id]["bbox"]["center"] = [float(x) for x in c]
            parts[pin.part_id]["bbox"]["halfextent"] = [float(x) for x in h]


def _category_index(category: Optional[str]) -> Optional[int]:
    if category is None:
        return None
    if category not in CATEGORIES:
        raise HTTPException(422, f"unknown category {category!r}; "
                                 f"expected one of {list(CATEGORIES)}")
    return CATEGORIES.index(category)


def _load_features(state: ServiceState, ref: str):
    try:
        path = state.resolve_ref(ref)
    except PermissionError as e:
        raise HTTPException(400, str(e))
    if not path.exists():
        raise HTTPException(400, f"feature file {ref!r} does not exist")
    try:
        return load_feature_file(path)
    except ArtigenError as e:
        raise HTTPException(400, f"cannot read feature file {ref!r}: {e}")


def _resolve_record(state: ServiceState, ref: str) -> ObjectRecord:
    try:
        path = state.resolve_ref(ref)
    except PermissionError as e:
        raise HTTPException(400, str(e))
    if not path.exists():
        raise HTTPException(404, f"unknown object reference {ref!r}")
    try:
        return load_object(path)
    except (ParseError, ValidationError) as e:
        raise HTTPException(400, f"cannot load {ref!r}: {e}")


def _record_meshes(state: ServiceState, ref: str, rec: ObjectRecord
                   ) -> Optional[dict]:
    """World-frame part meshes for an exported AOJ (link-local on disk)."""
    if not rec.meshes:
        return None
    base = state.resolve_ref(ref).parent
    roots = rec.obj.graph.roots()
    out = {}
    for pid, mesh_ref in rec.meshes.items():
        mesh_path = base / mesh_ref
        if not mesh_path.exists():
            raise HTTPException(404, f"mesh file {mesh_ref!r} referenced by "
                                     f"{ref!r} does not exist")
        mesh = load_mesh(mesh_path)
        if pid not in roots:
            origin = rec.obj.part_by_id(pid).joint.axis_origin.as_array()
            mesh = mesh.scaled((1.0, 1.0, 1.0), origin)
        out[pid] = mesh
    return out


def _append_report_csv(path: Path, gen: str, gt: str, resp: EvaluateResponse
                       ) -> None:
    import csv

    from ..metrics import CSV_HEADER

    new = not path.exists()
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("a", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        if new:
            w.writerow(("gen", "gt") + CSV_HEADER[1:])
        cells = [resp.rs_giou, resp.as_giou, resp.rs_cdist, resp.as_cdist,
                 resp.rs_cd, resp.as_cd, resp.aor, resp.graph_acc]
        w.writerow([gen, gt] + ["" if c is None else repr(c) for c in cells])


def create_app(cfg: Optional[ServiceConfig] = None) -> FastAPI:
    state = ServiceState(cfg or ServiceConfig())
    app = FastAPI(title="artigen service", version=__version__)
    app.state.artigen = state

    @app.exception_handler(RequestValidationError)
    async def malformed_payload(request, exc):
        return JSONResponse(status_code=400,
                            content={"detail": str(exc.errors()[:4])})

    @app.get("/v1/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", checkpoint=state.checkpoint_name,
                              library=state.library_name)

    @app.post("/v1/graphs/predict", response_model=PredictGraphResponse)
    def predict_graph(req: PredictGraphRequest) -> PredictGraphResponse:
        if req.predictor == "stub":
            if not req.feature_file:
                raise HTTPException(400, "stub predictor needs feature_file")
            grid, _ = _load_features(state, req.feature_file)
            try:
                prediction = predict_stub(grid)
            except NotSyntheticLayout as e:
                raise HTTPException(400, str(e))
        else:
            if not req.image_ref:
                raise HTTPException(400, "vlm predictor needs image_ref")
            if state.cfg.vlm is None:
                raise HTTPException(400, "vlm predictor is not configured")
            try:
                prediction = predict_vlm(req.image_ref, state.cfg.vlm,
                                         transport=state.cfg.vlm_transport,
                                         backoff=state.cfg.vlm_backoff)
            except (Unreachable, AuthFailed) as e:
                raise HTTPException(502, str(e))
            except RetriesExhausted as e:
                raise HTTPException(422, str(e))
        return PredictGraphResponse(graph=_graph_to_model(prediction.graph),
                                    source=prediction.source.value,
                                    raw_response=prediction.raw_response)

    @app.post("/v1/generate", response_model=GenerateResponse)
    def generate(req: GenerateRequest) -> GenerateResponse:
        if state.model is None:
            raise HTTPException(409, "no model checkpoint is loaded")
        features = None
        if req.feature_file:
            features, _ = _load_features(state, req.feature_file)
        if req.graph is not None:
            graph = _graph_from_model(req.graph)
        elif features is not None:
            try:
                graph = predict_stub(features).graph
            except NotSyntheticLayout as e:
                raise HTTPException(400, str(e))
        else:
            raise HTTPException(400, "request needs a graph or feature_file")
        pins = _pins_from_request(req, graph)
        category = _category_index(req.category)
        cond = ConditioningBundle(features=features,
                                  graph_mask=GraphMask.from_graph(graph),
                                  category=category)
        try:
            sampler = SamplerConfig(omega=req.omega, seed=req.seed)
        except ValueError as e:
            raise HTTPException(422, str(e))

        library = None
        if req.assemble:
            name = req.library or state.library_name
            library = state.libraries.get(name)
            if library is None:
                raise HTTPException(409, f"no library {name!r} is loaded")

        # The request graph's labels are the conditioning contract, so they
        # override the generated label rows in the returned objects.
        label_of = dict(graph.nodes)
        objects, seeds, export_ids = [], [], []
        for i in range(req.num_samples):
            cfg_i = SamplerConfig(omega=sampler.omega, seed=req.seed + i)
            tensor = sample(state.model, cond, cfg_i, state.schedule,
                            pins=pins)
            try:
                decoded = decode_attributes(tensor, graph)
                obj = ArticulatedAbstraction.from_parts(
                    [replace(p, label=label_of[p.id])
                     for p in decoded.sorted_parts()], category=req.category)
            except ArtigenError as e:
                raise HTTPException(422, f"sample failed to decode: {e}")
            rec = ObjectRecord(obj, object_id=f"sample-{req.seed + i}")
            obj_dict = object_to_dict(rec)
            _restore_pinned_bbox(obj, obj_dict, req)
            objects.append(obj_dict)
            seeds.append(req.seed + i)
            if library is not None:
                assembled = assemble(obj, library)
                asset_id = stable_asset_id({
                    "kind": "generate", "request": req.model_dump(),
                    "sample": i})
                out_dir = state.register_asset(asset_id)
                export_assembly(assembled, out_dir,
                                name=f"sample-{req.seed + i}")
                export_ids.append(asset_id)
        return GenerateResponse(objects=objects, seeds=seeds,
                                export_ids=export_ids or None)

    @app.post("/v1/evaluate", response_model=EvaluateResponse)
    def evaluate(req: EvaluateRequest) -> EvaluateResponse:
        gen_rec = _resolve_record(state, req.gen)
        gt_rec = _resolve_record(state, req.gt)
        gen_meshes = _record_meshes(state, req.gen, gen_rec)
        gt_meshes = _record_meshes(state, req.gt, gt_rec)
        cfg = ReportConfig(k_states=req.k_states, n_points=req.n_points,
                           seed=req.seed, scale_normalize=req.scale_normalize)
        rep = report(gen_rec.obj, gt_rec.obj, cfg, gen_meshes=gen_meshes,
                     gt_meshes=gt_meshes)
        resp = EvaluateResponse(gen=req.gen, gt=req.gt, **asdict(rep))
        if state.cfg.report_csv is not None:
            _append_report_csv(Path(state.cfg.report_csv), req.gen, req.gt,
                               resp)
        return resp

    @app.post("/v1/retrieve", response_model=RetrieveResponse)
    def retrieve(req: RetrieveRequest) -> RetrieveResponse:
        library = state.libraries.get(req.library)
        if library is None:
            raise HTTPException(404, f"no library {req.library!r} is loaded")
        try:
            rec = object_from_dict(req.abstraction)
        except (ParseError, ValidationError) as e:
            raise HTTPException(422, f"invalid abstraction: {e}")
        assembled = assemble(rec.obj, library,
                             AssembleConfig(k_states=req.k_states))
        asset_id = stable_asset_id({
            "kind": "retrieve", "library": req.library,
            "abstraction": req.abstraction, "k_states": req.k_states,
            "name": req.name})
        out_dir = state.register_asset(asset_id)
        paths = export_assembly(assembled, out_dir, name=req.name)
        files = sorted(p.name for p in out_dir.iterdir())
        provenance = [ProvenanceModel(
            part_id=p.part_id, label=p.label.value,
            source_object=p.source.object_id or "default",
            source_part=p.source.part_id) for p in assembled.parts]
        assert paths["urdf"].exists()
        return RetrieveResponse(asset_id=asset_id,
                                candidate_id=assembled.candidate_id,
                                files=files, provenance=provenance)

    @app.get("/v1/assets/{asset_id}")
    def asset_package(asset_id: str) -> Response:
        path = state.assets.get(asset_id)
        if path is None or not path.exists():
            raise HTTPException(404, f"unknown asset {asset_id!r}")
        buf = io.BytesIO()
        with zipfile.ZipFile(buf, "w", zipfile.ZIP_DEFLATED) as zf:
            for member in sorted(path.iterdir()):
                info = zipfile.ZipInfo(member.name,
                                       date_time=(1980, 1, 1, 0, 0, 0))
                zf.writestr(info, member.read_bytes())
        return Response(content=buf.getvalue(), media_type="application/zip")

    @app.get("/v1/assets/{asset_id}/{filename}")
    def asset_file(asset_id: str, filename: str) -> Response:
        path = state.assets.get(asset_id)
        if path is None:
            raise HTTPException(404, f"unknown asset {asset_id!r}")
        member = path / Path(filename).name
        if not member.exists():
            raise HTTPException(404, f"asset {asset_id!r} has no file "
                                     f"{filename!r}")
        media = "application/json" if member.suffix == ".aoj" else "text/plain"
        return Response(content=member.read_bytes(), media_type=media)

    return app
