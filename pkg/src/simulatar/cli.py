"""Command-line surface: blend, batch, geometry, distance, tost, serve.

Results go to stdout as one JSON record per line; diagnostics go to
stderr. Exit codes: 0 success, 1 config/domain, 2 ingestion, 3 geometry,
4 io, 64 usage.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from PIL import Image

from . import __version__
from .errors import (
    AssemblyError,
    ConfigError,
    DomainError,
    GeometryError,
    IngestionError,
    SimulatarError,
    ValidationError,
)
from .geometry import fov_from_diagonal, overlay_rect, viewing_distance
from .optics import BlendMode, TintExtent
from .pipeline import (
    JobRenderer,
    frame_name,
    ingest_frames,
    load_design,
    load_manifest,
    run_manifest,
    write_sidecar,
)
from .profiles import load_profiles
from .stats import build_grid, load_ratings_csv, tost_paired

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INGESTION = 2
EXIT_GEOMETRY = 3
EXIT_IO = 4
EXIT_USAGE = 64

CONFIG_ENV = "SIMULATAR_CONFIG"

_MODE_FLAGS = {"additive": BlendMode.ADDITIVE, "alpha-over": BlendMode.ALPHA_OVER}
_TINT_FLAGS = {"full": TintExtent.FULL_FRAME, "rect": TintExtent.OVERLAY_RECT_ONLY}


class CliParser(argparse.ArgumentParser):
    """argparse with the sysexits-style usage code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def emit(record: dict) -> None:
    print(json.dumps(record, sort_keys=True))


def _config_path(args) -> Path | None:
    if args.config:
        return Path(args.config)
    env = os.environ.get(CONFIG_ENV, "").strip()
    return Path(env) if env else None


def cmd_blend(args) -> int:
    registry = load_profiles(_config_path(args))
    camera = registry.camera(args.camera)
    hmd = registry.hmd(args.profile)
    design = load_design(args.design)
    frames = ingest_frames(args.frames)
    renderer = JobRenderer(
        design, hmd, camera, args.lux, _MODE_FLAGS[args.mode], _TINT_FLAGS[args.tint]
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    for i in range(1, len(frames) + 1):
        rendered = renderer.render(frames.load(i))
        Image.fromarray(rendered.pixels).save(out_dir / frame_name(i))
    write_sidecar(
        out_dir,
        context_id=Path(args.frames).name,
        hmd=hmd,
        camera=camera,
        design_id=design.id,
        lux=args.lux,
        mode=_MODE_FLAGS[args.mode],
        tint_extent=_TINT_FLAGS[args.tint],
        rect=renderer.rect,
        frames=len(frames),
    )
    emit(
        {
            "result": "blend",
            "frames": len(frames),
            "output": str(out_dir),
            "rect": {"x": renderer.rect.x, "y": renderer.rect.y, "w": renderer.rect.w, "h": renderer.rect.h},
            "seconds": round(time.perf_counter() - start, 3),
        }
    )
    return EXIT_OK


def cmd_batch(args) -> int:
    registry = load_profiles(_config_path(args))
    manifest = load_manifest(args.manifest)
    report = run_manifest(manifest, registry, parallelism=args.jobs)
    for job_report in report.jobs:
        emit({"result": "job", **job_report.to_dict()})
    emit({"result": "batch", "succeeded": report.succeeded, "failed": report.failed})
    return EXIT_OK if report.failed == 0 else EXIT_CONFIG


def cmd_geometry(args) -> int:
    registry = load_profiles(_config_path(args))
    camera = registry.camera(args.camera)
    hmd = registry.hmd(args.profile)
    cam_fov = fov_from_diagonal(camera.diagonal_fov_deg, camera.aspect)
    hmd_fov = fov_from_diagonal(hmd.diagonal_fov_deg, hmd.aspect)
    rect = overlay_rect(camera, hmd)
    emit(
        {
            "result": "geometry",
            "camera_fov": {
                "h_fov_deg": cam_fov.h_fov_deg,
                "v_fov_deg": cam_fov.v_fov_deg,
                "d_fov_deg": cam_fov.d_fov_deg,
            },
            "hmd_fov": {
                "h_fov_deg": hmd_fov.h_fov_deg,
                "v_fov_deg": hmd_fov.v_fov_deg,
                "d_fov_deg": hmd_fov.d_fov_deg,
            },
            "rect": {"x": rect.x, "y": rect.y, "w": rect.w, "h": rect.h},
            "frame_resolution": list(camera.frame_resolution),
        }
    )
    return EXIT_OK


def cmd_distance(args) -> int:
    registry = load_profiles(_config_path(args))
    camera = registry.camera(args.camera)
    cam_fov = fov_from_diagonal(camera.diagonal_fov_deg, camera.aspect)
    distance = viewing_distance(args.monitor_width_cm, cam_fov.h_fov_deg)
    emit(
        {
            "result": "distance",
            "monitor_width_cm": args.monitor_width_cm,
            "camera_h_fov_deg": cam_fov.h_fov_deg,
            "viewing_distance_cm": distance,
        }
    )
    return EXIT_OK


def cmd_tost(args) -> int:
    records = load_ratings_csv(args.csv)
    grid = build_grid(records, bound=args.bound, alpha=args.alpha)
    if args.grid:
        for (context, dimension), color in sorted(grid.cells.items()):
            emit({"result": "cell", "context": context, "dimension": dimension, "color": color.value})
        for context, dimension, variant, reason in grid.indeterminate:
            emit(
                {
                    "result": "indeterminate",
                    "context": context,
                    "dimension": dimension,
                    "variant": variant,
                    "reason": reason,
                }
            )
    else:
        for (context, dimension, variant), res in sorted(grid.results.items()):
            emit({"result": "tost", "context": context, "dimension": dimension, "variant": variant, **res.to_dict()})
    if grid.unpaired_count:
        print(f"warning: {grid.unpaired_count} unpaired records excluded", file=sys.stderr)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    static_dir = Path(os.environ.get("SIMULATAR_WEBUI", "frontend/dist"))
    app = create_app(
        assets_dir=Path(args.assets),
        data_dir=Path(args.data_dir),
        config_path=_config_path(args),
        static_dir=static_dir if static_dir.is_dir() else None,
    )
    uvicorn.run(app, host=args.bind, port=args.port, log_level="info")
    return EXIT_OK


def build_parser() -> CliParser:
    parser = CliParser(prog="simulatar", description="Simulate see-through HMD designs on context video.")
    parser.add_argument("--version", action="version", version=f"simulatar {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=CliParser)

    def add_config(p):
        p.add_argument("--config", help=f"profile config JSON (or ${CONFIG_ENV})")

    p_blend = sub.add_parser("blend", help="blend one design onto one frame directory")
    p_blend.add_argument("--frames", required=True, help="input directory of frame_%%06d.png")
    p_blend.add_argument("--design", required=True, help="design PNG at HMD canvas resolution")
    p_blend.add_argument("--profile", required=True, help="HMD profile id")
    p_blend.add_argument("--camera", required=True, help="camera profile id")
    p_blend.add_argument("--lux", required=True, type=float, help="ambient illuminance")
    p_blend.add_argument("--mode", choices=sorted(_MODE_FLAGS), default="additive")
    p_blend.add_argument("--tint", choices=sorted(_TINT_FLAGS), default="full")
    p_blend.add_argument("--out", required=True, help="output directory")
    add_config(p_blend)
    p_blend.set_defaults(func=cmd_blend)

    p_batch = sub.add_parser("batch", help="run a blend manifest")
    p_batch.add_argument("--manifest", required=True)
    p_batch.add_argument("--jobs", type=int, default=1, help="render worker count")
    add_config(p_batch)
    p_batch.set_defaults(func=cmd_batch)

    p_geometry = sub.add_parser("geometry", help="print FOV decomposition and overlay rect")
    p_geometry.add_argument("--camera", required=True)
    p_geometry.add_argument("--profile", required=True)
    add_config(p_geometry)
    p_geometry.set_defaults(func=cmd_geometry)

    p_distance = sub.add_parser("distance", help="viewing distance for a 1:1 FOV match")
    p_distance.add_argument("--monitor-width-cm", required=True, type=float, dest="monitor_width_cm")
    p_distance.add_argument("--camera", required=True)
    add_config(p_distance)
    p_distance.set_defaults(func=cmd_distance)

    p_tost = sub.add_parser("tost", help="equivalence tests over a ratings CSV")
    p_tost.add_argument("--csv", required=True)
    p_tost.add_argument("--bound", type=float, default=1.0)
    p_tost.add_argument("--alpha", type=float, default=0.05)
    p_tost.add_argument("--grid", action="store_true", help="print the context grid instead of raw results")
    p_tost.set_defaults(func=cmd_tost)

    p_serve = sub.add_parser("serve", help="run the local blending service")
    p_serve.add_argument("--port", type=int, default=8080)
    p_serve.add_argument("--bind", default="127.0.0.1")
    p_serve.add_argument("--assets", default="assets")
    p_serve.add_argument("--data-dir", default="simulatar-data", dest="data_dir")
    add_config(p_serve)
    p_serve.set_defaults(func=cmd_serve)

    return parser


_ERROR_EXITS = (
    (IngestionError, EXIT_INGESTION),
    (GeometryError, EXIT_GEOMETRY),
    (AssemblyError, EXIT_IO),
    ((ConfigError, ValidationError, DomainError), EXIT_CONFIG),
    (SimulatarError, EXIT_CONFIG),
)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SimulatarError as exc:
        for types, code in _ERROR_EXITS:
            if isinstance(exc, types):
                print(
                    json.dumps({"error": {"category": exc.category, "type": type(exc).__name__, "message": str(exc)}}),
                    file=sys.stderr,
                )
                return code
        raise AssertionError("unreachable")
    except OSError as exc:
        print(
            json.dumps({"error": {"category": "io", "type": type(exc).__name__, "message": str(exc)}}),
            file=sys.stderr,
        )
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
