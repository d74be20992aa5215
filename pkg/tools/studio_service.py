"""Run a small self-contained service instance for frontend tests.

Builds a throwaway workspace (tiny deterministic checkpoint, a three-object
library, fast sampler settings) and serves it with uvicorn until killed::

    python3 tools/studio_service.py --port 8731 --workdir /tmp/studio
"""
from __future__ import annotations

import argparse
import tempfile
from pathlib import Path

import torch
import uvicorn

from artigen.data import make_cabinets, save_object
from artigen.diffusion import Denoiser, DenoiserConfig, save_checkpoint
from artigen.service import ServiceConfig, create_app


def build_workspace(root: Path) -> ServiceConfig:
    root.mkdir(parents=True, exist_ok=True)
    library = root / "library"
    library.mkdir(exist_ok=True)
    for i, rec in enumerate(make_cabinets(3, seed=11)):
        save_object(rec, library / f"cab{i}.aoj")
    torch.manual_seed(0)
    save_checkpoint(root / "tiny.ckpt",
                    Denoiser(DenoiserConfig(layers=2, heads=4, hidden=32)))
    return ServiceConfig(checkpoint=root / "tiny.ckpt", library=library,
                         data_root=root, assets_dir=root / "assets",
                         timesteps=8)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--port", type=int, default=8731)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--workdir", type=Path, default=None)
    args = parser.parse_args()
    workdir = args.workdir or Path(tempfile.mkdtemp(prefix="studio-svc-"))
    app = create_app(build_workspace(workdir))
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")


if __name__ == "__main__":
    main()
