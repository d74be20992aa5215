"""Command-line entry point wiring the toolkit into reproducible commands.

Every command is seeded (``--seed``), writes only under its ``--out``
destination, and defaults unset paths to ``$ARTIC_HOME`` (``~/.artigen``).
A ``--config`` JSON file may supply per-command flag defaults. Exit codes:
0 on success, 1 on domain errors, 2 on usage errors.
"""
from __future__ import annotations

import functools
import json
import math
import os
from dataclasses import replace
from pathlib import Path

import click
import numpy as np
import torch

from .conditioning import (
    GRID_SIDE,
    load_feature_file,
    sample_camera,
    save_feature_file,
    synthetic_features,
)
from .core import (
    CATEGORIES,
    MAX_PARTS,
    ArticulatedAbstraction,
    ConnectivityGraph,
    SemanticLabel,
    validate_graph,
)
from .data import (
    N_ATTRS,
    N_DIMS,
    AugmentConfig,
    DatasetManifest,
    ManifestEntry,
    ObjectRecord,
    augment_records,
    decode_attributes,
    encode_attributes,
    load_manifest,
    load_object,
    save_manifest,
    save_object,
)
from .diffusion import (
    ConditioningBundle,
    Denoiser,
    DenoiserConfig,
    GraphMask,
    PinSet,
    SamplerConfig,
    TrainConfig,
    TrainExample,
    add_noise,
    example_from_record,
    export_attention,
    load_checkpoint,
    make_schedule,
    sample as run_sampling,
    save_checkpoint,
    train as run_training,
)
from .env import ENV_HOME, ENV_VLM_ENDPOINT, ENV_VLM_MODEL
from .errors import ArtigenError, ParseError, ValidationError
from .graphs import VlmConfig, predict_stub, predict_vlm
from .metrics import ReportConfig, format_report_csv, report, \
    write_report_csv, write_report_json
from .retrieval import AssembleConfig, assemble, export_assembly, \
    load_library, load_mesh
from .utils.validation import derive_seed


def artic_home() -> Path:
    """Base directory for default paths; override with $ARTIC_HOME."""
    return Path(os.environ.get(ENV_HOME, "~/.artigen")).expanduser()


def guarded(fn):
    """Map domain failures to exit 1; click owns usage errors (exit 2)."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ArtigenError, OSError) as e:
            raise click.ClickException(str(e)) from e

    return wrapper


def _category_index(category) -> int | None:
    return CATEGORIES.index(category) if category in CATEGORIES else None


def _load_graph(path: Path) -> ConnectivityGraph:
    """A conditioning graph from an .aoj object or a JSON node list."""
    if path.suffix == ".aoj":
        return load_object(path).obj.graph
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
        nodes = raw["nodes"] if isinstance(raw, dict) else raw
        pairs = [(int(n["id"]), SemanticLabel(n["label"])) for n in nodes]
        parent_of = {int(n["id"]): int(n["parent"]) for n in nodes
                     if n.get("parent") is not None}
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise ParseError(f"cannot read graph {path}: {e}") from e
    g = ConnectivityGraph(pairs, parent_of)
    validate_graph(g)
    return g


def _parse_pins(specs, graph: ConnectivityGraph) -> PinSet | None:
    """``PART:ROW:V0,..,V5`` specs into a PinSet over the graph's slots."""
    if not specs:
        return None
    slot_of = {pid: i for i, pid in enumerate(graph.ids())}
    mask = np.zeros((MAX_PARTS, N_ATTRS), dtype=bool)
    values = np.zeros((MAX_PARTS, N_ATTRS, N_DIMS))
    for spec in specs:
        try:
            part_s, row_s, vals_s = spec.split(":")
            pid, row = int(part_s), int(row_s)
            vals = [float(v) for v in vals_s.split(",")]
        except ValueError:
            raise click.UsageError(
                f"--pin {spec!r}: expected PART:ROW:V0,...,V{N_DIMS - 1}")
        if not 0 <= row < N_ATTRS:
            raise click.UsageError(
                f"--pin {spec!r}: row must be in [0, {N_ATTRS})")
        if len(vals) != N_DIMS:
            raise click.UsageError(
                f"--pin {spec!r}: expected {N_DIMS} values, got {len(vals)}")
        if pid not in slot_of:
            raise ValidationError(
                f"pin references part {pid} absent from the graph")
        if not all(math.isfinite(v) for v in vals):
            raise ValidationError(f"pin values for part {pid} must be finite")
        mask[slot_of[pid], row] = True
        values[slot_of[pid], row] = vals
    return PinSet(mask, values)


def _world_meshes(rec: ObjectRecord, base: Path):
    """Sidecar meshes are stored link-local; shift children to world frame."""
    if not rec.meshes:
        return None
    roots = rec.obj.graph.roots()
    out = {}
    for pid, ref in rec.meshes.items():
        mesh = load_mesh(base / ref)
        if pid not in roots:
            origin = rec.obj.part_by_id(pid).joint.axis_origin.as_array()
            mesh = mesh.scaled((1.0, 1.0, 1.0), origin)
        out[pid] = mesh
    return out


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--config", "config_path", default=None,
              type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="JSON file mapping command names to flag defaults.")
@click.pass_context
def main(ctx, config_path):
    """Articulated-object toolkit: datasets, training, generation, export."""
    if config_path is None:
        return
    try:
        defaults = json.loads(config_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise click.UsageError(f"--config {config_path}: {e}")
    if not isinstance(defaults, dict):
        raise click.UsageError(
            "--config must hold a JSON object of per-command defaults")
    ctx.default_map = defaults


@main.command()
@click.argument("sources", nargs=-1, required=True,
                type=click.Path(exists=True, path_type=Path))
@click.option("--out", default=None, type=click.Path(path_type=Path),
              help="Manifest path [default: $ARTIC_HOME/data/manifest.json].")
@click.option("--split", default="train", show_default=True,
              help="Split tag recorded for every entry.")
@guarded
def ingest(sources, out, split):
    """Validate AOJ files or directories and build a dataset manifest."""
    out = out or artic_home() / "data" / "manifest.json"
    files = []
    for src in sources:
        files.extend(sorted(src.glob("*.aoj")) if src.is_dir() else [src])
    if not files:
        raise ValidationError("no .aoj files found under the given sources")
    out.parent.mkdir(parents=True, exist_ok=True)
    entries = []
    for f in files:
        load_object(f)  # any invalid object aborts the whole ingest
        rel = os.path.relpath(f.resolve(), out.parent.resolve())
        entries.append(ManifestEntry(rel, (), split))
    save_manifest(DatasetManifest(entries, root=out.parent), out)
    click.echo(f"ingested {len(entries)} objects -> {out}")


@main.command()
@click.option("--manifest", required=True, type=click.Path(
    exists=True, dir_okay=False, path_type=Path))
@click.option("--out", default=None, type=click.Path(path_type=Path),
              help="Output directory [default: $ARTIC_HOME/augment].")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--swap/--no-swap", default=True, show_default=True)
@click.option("--flip/--no-flip", default=True, show_default=True)
@click.option("--stack/--no-stack", default=True, show_default=True)
@click.option("--scale/--no-scale", default=True, show_default=True)
@click.option("--p-flip", type=click.FloatRange(0.0, 1.0), default=0.5,
              show_default=True)
@click.option("--p-scale", type=click.FloatRange(0.0, 1.0), default=0.5,
              show_default=True)
@click.option("--p-stack", type=click.FloatRange(0.0, 1.0), default=0.25,
              show_default=True)
@guarded
def augment(manifest, out, seed, swap, flip, stack, scale,
            p_flip, p_scale, p_stack):
    """Write one seeded augmentation pass of a dataset plus its manifest."""
    out = out or artic_home() / "augment"
    m = load_manifest(manifest)
    records = [load_object(m.resolve(e.object)) for e in m.entries]
    cfg = AugmentConfig(swap=swap, flip=flip, stack=stack, scale=scale,
                        p_flip=p_flip, p_scale=p_scale, p_stack=p_stack,
                        seed=seed)
    result = augment_records(records, cfg)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for i, rec in enumerate(result):
        name = f"{i:04d}_{rec.object_id or 'object'}.aoj"
        save_object(rec, out / name)
        entries.append(ManifestEntry(name, (), "train"))
    save_manifest(DatasetManifest(entries, root=out), out / "manifest.json")
    click.echo(f"augmented {len(records)} -> {len(result)} objects in {out}")


@main.command()
@click.option("--manifest", required=True, type=click.Path(
    exists=True, dir_okay=False, path_type=Path))
@click.option("--out", default=None, type=click.Path(path_type=Path),
              help="Output directory [default: $ARTIC_HOME/features].")
@click.option("--views", type=click.IntRange(min=1), default=2,
              show_default=True, help="Cameras sampled per object.")
@click.option("--seed", type=int, default=0, show_default=True)
@guarded
def features(manifest, out, views, seed):
    """Render patch-feature files for every manifest object."""
    out = out or artic_home() / "features"
    m = load_manifest(manifest)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    written = 0
    for i, e in enumerate(m.entries):
        src = m.resolve(e.object)
        rec = load_object(src)
        names = []
        for v in range(views):
            cam = sample_camera(derive_seed(seed, "camera", i, v))
            grid, fg = synthetic_features(rec.obj, cam)
            name = f"{src.stem}_view{v}.apfg"
            save_feature_file(out / name, grid, fg)
            names.append(name)
            written += 1
        rel = os.path.relpath(src.resolve(), out.resolve())
        entries.append(ManifestEntry(rel, names, e.split))
    save_manifest(DatasetManifest(entries, root=out), out / "manifest.json")
    click.echo(f"wrote {written} feature files for {len(m)} objects -> {out}")


@main.command()
@click.option("--manifest", required=True, type=click.Path(
    exists=True, dir_okay=False, path_type=Path))
@click.option("--out", default=None, type=click.Path(path_type=Path),
              help="Output directory [default: $ARTIC_HOME/train].")
@click.option("--split", default="train", show_default=True,
              help="Manifest split to train on; 'all' uses every entry.")
@click.option("--epochs", type=click.IntRange(min=1), default=200,
              show_default=True)
@click.option("--batch-size", type=click.IntRange(min=1), default=40,
              show_default=True)
@click.option("--timesteps-per-object", type=click.IntRange(min=1),
              default=16, show_default=True)
@click.option("--lr", type=click.FloatRange(min=0, min_open=True),
              default=1e-4, show_default=True)
@click.option("--weight-decay", type=click.FloatRange(min=0), default=0.0,
              show_default=True)
@click.option("--lam", type=click.FloatRange(min=0), default=0.1,
              show_default=True, help="Foreground-loss weight.")
@click.option("--layers", type=click.IntRange(min=1), default=6,
              show_default=True)
@click.option("--heads", type=click.IntRange(min=1), default=4,
              show_default=True)
@click.option("--hidden", type=click.IntRange(min=1), default=128,
              show_default=True)
@click.option("--d-f", type=click.IntRange(min=1), default=32,
              show_default=True, help="Patch feature dimension.")
@click.option("--timesteps", type=click.IntRange(min=1), default=1000,
              show_default=True, help="Noise schedule length.")
@click.option("--seed", type=int, default=0, show_default=True)
@guarded
def train(manifest, out, split, epochs, batch_size, timesteps_per_object,
          lr, weight_decay, lam, layers, heads, hidden, d_f, timesteps, seed):
    """Train a denoiser; writes model.ckpt and train.jsonl under --out."""
    out = out or artic_home() / "train"
    m = load_manifest(manifest)
    entries = [e for e in m.entries if split in ("all", e.split)]
    if not entries:
        raise ValidationError(f"manifest has no {split!r} entries")
    examples = []
    for i, e in enumerate(entries):
        rec = load_object(m.resolve(e.object))
        if e.features:
            grid, fg = load_feature_file(m.resolve(e.features[0]))
            if grid.d_f != d_f:
                raise ValidationError(
                    f"{e.features[0]} has d_f = {grid.d_f}, model wants {d_f}")
            examples.append(TrainExample(
                x0=encode_attributes(rec.obj),
                graph_mask=GraphMask.from_graph(rec.obj.graph),
                category=_category_index(rec.obj.category),
                features=grid, fg_mask=fg))
        else:
            examples.append(example_from_record(
                rec, camera_seed=derive_seed(seed, "camera", i)))
    schedule = make_schedule(timesteps)
    torch.manual_seed(derive_seed(seed, "init"))
    model = Denoiser(DenoiserConfig(layers=layers, heads=heads,
                                    hidden=hidden, d_f=d_f))
    cfg = TrainConfig(lam=lam, lr=lr, weight_decay=weight_decay,
                      batch_size=batch_size,
                      timesteps_per_object=timesteps_per_object,
                      epochs=epochs, seed=seed)
    out.mkdir(parents=True, exist_ok=True)
    history = run_training(model, examples, schedule, cfg,
                           log_path=out / "train.jsonl")
    save_checkpoint(out / "model.ckpt", model)
    click.echo(f"trained on {len(examples)} objects for {epochs} epochs; "
               f"final loss {history[-1]['loss']:.6f}")
    click.echo(f"checkpoint -> {out / 'model.ckpt'}")


@main.command()
@click.option("--checkpoint", required=True, type=click.Path(
    exists=True, dir_okay=False, path_type=Path))
@click.option("--graph", "graph_path", default=None, type=click.Path(
    exists=True, dir_okay=False, path_type=Path),
    help="Conditioning graph: an .aoj object or a JSON node list.")
@click.option("--features", "features_path", default=None, type=click.Path(
    exists=True, dir_okay=False, path_type=Path),
    help="Patch-feature file for image conditioning.")
@click.option("--category", default=None, type=click.Choice(CATEGORIES))
@click.option("--num-samples", type=click.IntRange(min=1), default=1,
              show_default=True)
@click.option("--seed", type=int, default=0, show_default=True,
              help="Sample i uses seed + i.")
@click.option("--omega", type=click.FloatRange(min=0), default=0.0,
              show_default=True, help="Classifier-free guidance weight.")
@click.option("--timesteps", type=click.IntRange(min=1), default=1000,
              show_default=True, help="Noise schedule length.")
@click.option("--pin", "pins", multiple=True, metavar="PART:ROW:V0,..,V5",
              help="Hold one attribute row fixed through sampling.")
@click.option("--out", default=None, type=click.Path(path_type=Path),
              help="Output directory [default: $ARTIC_HOME/sample].")
@guarded
def sample(checkpoint, graph_path, features_path, category, num_samples,
           seed, omega, timesteps, pins, out):
    """Draw objects from a checkpoint; writes one AOJ file per sample."""
    out = out or artic_home() / "sample"
    model = load_checkpoint(checkpoint)
    schedule = make_schedule(timesteps)
    grid = fg = None
    if features_path is not None:
        grid, fg = load_feature_file(features_path)
        if grid.d_f != model.cfg.d_f:
            raise ValidationError(f"{features_path} has d_f = {grid.d_f}, "
                                  f"checkpoint wants {model.cfg.d_f}")
    if graph_path is not None:
        graph = _load_graph(graph_path)
    elif grid is not None:
        graph = predict_stub(grid).graph
    else:
        raise click.UsageError("provide --graph and/or --features")
    cond = ConditioningBundle(features=grid,
                              graph_mask=GraphMask.from_graph(graph),
                              category=_category_index(category), fg_mask=fg)
    pin_set = _parse_pins(pins, graph)
    label_of = dict(graph.nodes)
    out.mkdir(parents=True, exist_ok=True)
    for i in range(num_samples):
        cfg = SamplerConfig(omega=omega, seed=seed + i)
        tensor = run_sampling(model, cond, cfg, schedule, pins=pin_set)
        decoded = decode_attributes(tensor, graph)
        # the conditioning graph's labels are the contract; decoded label
        # rows are advisory
        obj = ArticulatedAbstraction.from_parts(
            [replace(p, label=label_of[p.id]) for p in decoded.sorted_parts()],
            category=category)
        name = f"sample-{seed + i}"
        save_object(ObjectRecord(obj, object_id=name), out / f"{name}.aoj")
    click.echo(f"wrote {num_samples} samples -> {out}")


@main.command("predict-graph")
@click.option("--predictor", type=click.Choice(["stub", "vlm"]),
              default="stub", show_default=True)
@click.option("--features", "features_path", default=None, type=click.Path(
    exists=True, dir_okay=False, path_type=Path),
    help="Patch-feature file (stub predictor).")
@click.option("--image", "image_ref", default=None,
              help="Image reference forwarded to the VLM.")
@click.option("--endpoint", default=None,
              help=f"Chat endpoint [default: ${ENV_VLM_ENDPOINT}].")
@click.option("--model", "model_name", default=None,
              help=f"Chat model [default: ${ENV_VLM_MODEL}].")
@click.option("--out", default=None, type=click.Path(path_type=Path),
              help="Output JSON path [default: stdout].")
@guarded
def predict_graph(predictor, features_path, image_ref, endpoint,
                  model_name, out):
    """Predict a part-connectivity graph from features or an image."""
    if predictor == "stub":
        if features_path is None:
            raise click.UsageError("--predictor stub requires --features")
        grid, _ = load_feature_file(features_path)
        pred = predict_stub(grid)
    else:
        endpoint = endpoint or os.environ.get(ENV_VLM_ENDPOINT)
        model_name = model_name or os.environ.get(ENV_VLM_MODEL)
        if image_ref is None or endpoint is None or model_name is None:
            raise click.UsageError(
                "--predictor vlm requires --image, --endpoint, and --model")
        pred = predict_vlm(image_ref, VlmConfig(endpoint=endpoint,
                                                model=model_name))
    g = pred.graph
    payload = {
        "nodes": [{"id": i, "label": label.value,
                   "parent": g.parent_of.get(i)} for i, label in g.nodes],
        "source": pred.source.value,
        "raw_response": pred.raw_response,
    }
    text = json.dumps(payload, indent=2)
    if out is None:
        click.echo(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text + "\n", encoding="utf-8")
        click.echo(f"graph -> {out}")


@main.command()
@click.option("--abstraction", required=True, type=click.Path(
    exists=True, dir_okay=False, path_type=Path),
    help="AOJ file to assemble meshes for.")
@click.option("--library", "library_path", required=True, type=click.Path(
    exists=True, path_type=Path),
    help="Directory of .aoj files or a dataset manifest.")
@click.option("--out", default=None, type=click.Path(path_type=Path),
              help="Output directory [default: $ARTIC_HOME/retrieve].")
@click.option("--name", default="object", show_default=True,
              help="Stem for the exported URDF/AOJ/mesh files.")
@click.option("--k-states", type=click.IntRange(min=2), default=5,
              show_default=True)
@guarded
def retrieve(abstraction, library_path, out, name, k_states):
    """Assemble library meshes for an abstraction and export URDF + AOJ."""
    out = out or artic_home() / "retrieve"
    rec = load_object(abstraction)
    library = load_library(library_path)
    assembled = assemble(rec.obj, library, AssembleConfig(k_states=k_states))
    out.mkdir(parents=True, exist_ok=True)
    paths = export_assembly(assembled, out, name=name)
    click.echo(f"candidate {assembled.candidate_id}")
    click.echo(f"urdf -> {paths['urdf']}")
    click.echo(f"aoj -> {paths['aoj']}")


@main.command()
@click.option("--gen", "gen_paths", multiple=True, required=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="Generated object; repeatable, paired with --gt by order.")
@click.option("--gt", "gt_paths", multiple=True, required=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="Ground-truth object; repeatable.")
@click.option("--out", default=None, type=click.Path(path_type=Path),
              help="CSV path; a .json mirror is written next to it "
                   "[default: stdout].")
@click.option("--k-states", type=click.IntRange(min=2), default=5,
              show_default=True)
@click.option("--n-points", type=click.IntRange(min=8), default=2048,
              show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--scale-normalize/--no-scale-normalize", default=True,
              show_default=True)
@guarded
def evaluate(gen_paths, gt_paths, out, k_states, n_points, seed,
             scale_normalize):
    """Score generated objects against ground truth, one CSV row per pair."""
    if len(gen_paths) != len(gt_paths):
        raise click.UsageError(
            f"--gen given {len(gen_paths)} times but --gt {len(gt_paths)}")
    cfg = ReportConfig(k_states=k_states, n_points=n_points, seed=seed,
                       scale_normalize=scale_normalize)
    rows = []
    for g, t in zip(gen_paths, gt_paths):
        gen_rec, gt_rec = load_object(g), load_object(t)
        rep = report(gen_rec.obj, gt_rec.obj, cfg,
                     gen_meshes=_world_meshes(gen_rec, g.parent),
                     gt_meshes=_world_meshes(gt_rec, t.parent))
        rows.append((g.stem, rep))
    if out is None:
        click.echo(format_report_csv(rows), nl=False)
    else:
        write_report_csv(rows, out)
        write_report_json(rows, out.with_suffix(".json"))
        click.echo(f"report -> {out}")


@main.command()
@click.option("--checkpoint", required=True, type=click.Path(
    exists=True, dir_okay=False, path_type=Path))
@click.option("--object", "object_path", required=True, type=click.Path(
    exists=True, dir_okay=False, path_type=Path),
    help="AOJ file whose encoded attributes seed the noised input.")
@click.option("--features", "features_path", required=True, type=click.Path(
    exists=True, dir_okay=False, path_type=Path))
@click.option("--t", "timestep", type=click.IntRange(min=1), default=500,
              show_default=True, help="Diffusion timestep to inspect.")
@click.option("--layer", default="mean", show_default=True,
              help="Denoiser layer index, or 'mean' over all layers.")
@click.option("--part", "part_id", type=int, default=None,
              help="Restrict output to one part id [default: all parts].")
@click.option("--timesteps", type=click.IntRange(min=1), default=1000,
              show_default=True, help="Noise schedule length.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", default=None, type=click.Path(path_type=Path),
              help="Output directory [default: $ARTIC_HOME/attn].")
@guarded
def attn(checkpoint, object_path, features_path, timestep, layer, part_id,
         timesteps, seed, out):
    """Export image cross-attention as 16x16 CSV heat grids per part."""
    out = out or artic_home() / "attn"
    if timestep > timesteps:
        raise click.UsageError(f"--t {timestep} exceeds --timesteps "
                               f"{timesteps}")
    model = load_checkpoint(checkpoint)
    rec = load_object(object_path)
    grid, fg = load_feature_file(features_path)
    if grid.d_f != model.cfg.d_f:
        raise ValidationError(f"{features_path} has d_f = {grid.d_f}, "
                              f"checkpoint wants {model.cfg.d_f}")
    schedule = make_schedule(timesteps)
    x0 = encode_attributes(rec.obj)
    rng = np.random.default_rng(derive_seed(seed, "attn"))
    x_t = add_noise(x0, timestep, rng.standard_normal(x0.data.shape),
                    schedule)
    cond = ConditioningBundle(features=grid,
                              graph_mask=GraphMask.from_graph(rec.obj.graph),
                              category=_category_index(rec.obj.category),
                              fg_mask=fg)
    record = export_attention(model, x_t, timestep, cond)
    if layer == "mean":
        weights = record.weights.mean(axis=0)
    else:
        try:
            idx = int(layer)
        except ValueError:
            raise click.UsageError("--layer must be an index or 'mean'")
        if not 0 <= idx < record.weights.shape[0]:
            raise click.UsageError(f"--layer {idx} outside "
                                   f"[0, {record.weights.shape[0]})")
        weights = record.weights[idx]
    ids = rec.obj.graph.ids()
    if part_id is not None and part_id not in ids:
        raise ValidationError(f"part {part_id} absent from {object_path}")
    targets = ids if part_id is None else [part_id]
    out.mkdir(parents=True, exist_ok=True)
    for pid in targets:
        heat = weights[ids.index(pid)].reshape(GRID_SIDE, GRID_SIDE)
        np.savetxt(out / f"attn_part{pid}.csv", heat, delimiter=",",
                   fmt="%.9g")
    click.echo(f"wrote {len(targets)} heat grids -> {out}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=click.IntRange(1, 65535), default=8000,
              show_default=True)
@click.option("--checkpoint", default=None, type=click.Path(
    exists=True, dir_okay=False, path_type=Path),
    help="Denoiser checkpoint [default: $ARTIGEN_CHECKPOINT].")
@click.option("--library", default=None, type=click.Path(
    exists=True, path_type=Path),
    help="Retrieval library [default: $ARTIGEN_LIBRARY].")
@click.option("--data-root", default=None, type=click.Path(
    exists=True, file_okay=False, path_type=Path),
    help="Directory request file references resolve under.")
@click.option("--assets-dir", default=None, type=click.Path(path_type=Path),
              help="Where exported assets are written.")
@click.option("--timesteps", type=click.IntRange(min=1), default=1000,
              show_default=True, help="Noise schedule length.")
@click.option("--report-csv", default=None, type=click.Path(path_type=Path),
              help="Append one row per evaluation request to this CSV.")
@guarded
def serve(host, port, checkpoint, library, data_root, assets_dir, timesteps,
          report_csv):
    """Start the HTTP service."""
    import uvicorn

    from .service import config_from_env, create_app

    cfg = config_from_env(checkpoint=checkpoint, library=library,
                          data_root=data_root, assets_dir=assets_dir,
                          timesteps=timesteps, report_csv=report_csv)
    app = create_app(cfg)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
