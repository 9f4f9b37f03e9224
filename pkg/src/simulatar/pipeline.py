"""Frame ingestion, per-frame rendering, and batch jobs over manifests.

The canonical media interface is numbered PNG sequences
(frame_000001.png, ...) so outputs stay bit-exact and the core carries no
codec dependency; muxing to a container is delegated to an optional
external transcoder named by the SIMULATAR_TRANSCODER environment
variable.

Rendering order per frame is fixed: decode background to linear light,
apply the combiner tint, place the overlay rect, resample the design,
composite with the lux-dependent opacity and contrast parameters, encode
back to sRGB. Identical inputs produce bit-identical output regardless of
worker count.
"""

from __future__ import annotations

import json
import os
import re
import subprocess
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from . import __version__
from .errors import ConfigError, IngestionError, ValidationError
from .geometry import OverlayRect, overlay_rect, resample_design
from .optics import (
    DECODE_LUT,
    BlendMode,
    TintExtent,
    quantize_code,
    srgb_encode_array,
    wash_out_array,
)
from .profiles import CameraProfile, ContextClip, HmdProfile, ProfileRegistry, eval_curve

FRAME_NAME_RE = re.compile(r"^frame_(\d{6})\.png$")

TRANSCODER_ENV = "SIMULATAR_TRANSCODER"


def frame_name(index: int) -> str:
    return f"frame_{index:06d}.png"


@dataclass
class FrameBuffer:
    """One RGB frame, 8-bit sRGB."""

    pixels: np.ndarray

    def __post_init__(self):
        if self.pixels.ndim != 3 or self.pixels.shape[2] != 3 or self.pixels.dtype != np.uint8:
            raise ValidationError(f"FrameBuffer expects HxWx3 uint8 pixels, got {self.pixels.shape} {self.pixels.dtype}")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True)
class DesignAsset:
    """An RGBA design canvas at HMD resolution.

    background_mask, when present, marks the design's solid-background
    pixels: the lighting-dependent opacity scaling applies only there.
    """

    id: str
    pixels: np.ndarray
    background_mask: np.ndarray | None = None

    def __post_init__(self):
        if self.pixels.ndim != 3 or self.pixels.shape[2] != 4 or self.pixels.dtype != np.uint8:
            raise ValidationError(f"design {self.id}: expected HxWx4 uint8 RGBA, got {self.pixels.shape} {self.pixels.dtype}")
        if self.background_mask is not None:
            if self.background_mask.shape != self.pixels.shape[:2]:
                raise ValidationError(
                    f"design {self.id}: mask shape {self.background_mask.shape} does not match "
                    f"canvas {self.pixels.shape[:2]}"
                )

    @property
    def canvas_resolution(self) -> tuple[int, int]:
        return self.pixels.shape[1], self.pixels.shape[0]


def load_design(path: str | Path, design_id: str | None = None) -> DesignAsset:
    """Load a design PNG; a sibling <stem>.mask.png becomes the background mask."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"design file not found: {path}")
    with Image.open(path) as im:
        rgba = np.asarray(im.convert("RGBA"))
    mask = None
    mask_path = path.with_suffix(".mask.png")
    if mask_path.is_file():
        with Image.open(mask_path) as im:
            mask = np.asarray(im.convert("L")) >= 128
    return DesignAsset(id=design_id or path.stem, pixels=rgba, background_mask=mask)


class FrameSequence:
    """Lazy, ordered access to a directory of numbered frames."""

    def __init__(self, directory: Path, paths: list[Path], size: tuple[int, int]):
        self.directory = directory
        self._paths = paths
        self.size = size  # (width, height)

    def __len__(self) -> int:
        return len(self._paths)

    def path(self, index: int) -> Path:
        """Path of the 1-based frame index."""
        return self._paths[index - 1]

    def load(self, index: int) -> FrameBuffer:
        with Image.open(self.path(index)) as im:
            return FrameBuffer(pixels=np.asarray(im.convert("RGB")))

    def __iter__(self):
        for i in range(1, len(self) + 1):
            yield self.load(i)


def ingest_frames(path: str | Path) -> FrameSequence:
    """Scan a frame directory; indices must run 1..N with no gaps.

    Only PNG headers are read here, so a long clip costs little until
    frames are actually loaded.
    """
    directory = Path(path)
    if not directory.is_dir():
        raise IngestionError(f"frame directory not found: {directory}")
    indexed: dict[int, Path] = {}
    for entry in directory.iterdir():
        match = FRAME_NAME_RE.match(entry.name)
        if match:
            indexed[int(match.group(1))] = entry
    if not indexed:
        raise IngestionError(f"{directory}: no frames matching frame_%06d.png")
    count = max(indexed)
    for i in range(1, count + 1):
        if i not in indexed:
            raise IngestionError(f"{directory}: frame sequence has a gap at index {i}")
    paths = [indexed[i] for i in range(1, count + 1)]
    size = None
    for p in paths:
        with Image.open(p) as im:
            if size is None:
                size = im.size
            elif im.size != size:
                raise IngestionError(f"{p.name}: dimensions {im.size} differ from first frame {size}")
    return FrameSequence(directory=directory, paths=paths, size=size)


class JobRenderer:
    """Precomputed render state for one (design, hmd, camera, lux) combination.

    Every render path — single-frame previews, the CLI, and batch jobs —
    goes through render(); byte-equal inputs give byte-equal outputs.
    """

    def __init__(
        self,
        design: DesignAsset,
        hmd: HmdProfile,
        camera: CameraProfile,
        lux: float,
        mode: BlendMode = BlendMode.ADDITIVE,
        tint_extent: TintExtent = TintExtent.FULL_FRAME,
    ):
        self.hmd = hmd
        self.camera = camera
        self.mode = mode
        self.tint_extent = tint_extent
        self.lux = float(lux)
        self.rect: OverlayRect = overlay_rect(camera, hmd)
        self.alpha_scale = eval_curve(hmd.opacity_curve, self.lux)
        self.retention = eval_curve(hmd.contrast_curve, self.lux)

        rgb_lin, alpha, mask = resample_design(design, self.rect)
        self._design_washed = wash_out_array(rgb_lin, self.retention)
        if mask is None:
            self._a_eff = alpha * self.alpha_scale
        else:
            # Opacity scaling only where the design declares a solid
            # background; mask is fractional coverage after resampling.
            self._a_eff = alpha * (1.0 + (self.alpha_scale - 1.0) * mask)

        # Outside the rect every pixel is a pure function of its 8-bit
        # code, so a 256-entry table reproduces the full decode->tint->
        # encode chain exactly at a fraction of the cost.
        t_outside = hmd.transmittance if tint_extent is TintExtent.FULL_FRAME else 1.0
        self._outside_lut = quantize_code(srgb_encode_array(DECODE_LUT * t_outside))

    def render(self, bg: FrameBuffer) -> FrameBuffer:
        if (bg.width, bg.height) != self.camera.frame_resolution:
            raise ValidationError(
                f"frame size {bg.width}x{bg.height} does not match camera "
                f"{self.camera.id} resolution {self.camera.frame_resolution[0]}x{self.camera.frame_resolution[1]}"
            )
        r = self.rect
        out = self._outside_lut[bg.pixels]
        bg_rect = bg.pixels[r.y : r.y + r.h, r.x : r.x + r.w, :]
        bg_lin = DECODE_LUT[bg_rect] * self.hmd.transmittance
        a = self._a_eff[..., np.newaxis]
        if self.mode is BlendMode.ADDITIVE:
            blended = bg_lin + self._design_washed * a
        else:
            blended = self._design_washed * a + bg_lin * (1.0 - a)
        blended = np.clip(blended, 0.0, 1.0)
        out[r.y : r.y + r.h, r.x : r.x + r.w, :] = quantize_code(srgb_encode_array(blended))
        return FrameBuffer(pixels=out)


def render_frame(
    bg: FrameBuffer,
    design: DesignAsset,
    hmd: HmdProfile,
    camera: CameraProfile,
    lux: float,
    mode: BlendMode = BlendMode.ADDITIVE,
    tint_extent: TintExtent = TintExtent.FULL_FRAME,
) -> FrameBuffer:
    """Render one design-blended frame (convenience wrapper over JobRenderer)."""
    renderer = JobRenderer(design, hmd, camera, lux, mode, tint_extent)
    return renderer.render(bg)


@dataclass(frozen=True)
class BlendJob:
    context_id: str
    hmd_profile_id: str
    design_id: str
    output_dir: Path
    lux: float | None = None
    mode: BlendMode = BlendMode.ADDITIVE
    tint_extent: TintExtent = TintExtent.FULL_FRAME


@dataclass
class BlendManifest:
    """Resolved batch description: contexts x profiles x designs."""

    jobs: list[BlendJob]
    contexts: dict[str, ContextClip]
    designs: dict[str, DesignAsset]

    def __post_init__(self):
        outputs = [str(job.output_dir) for job in self.jobs]
        if len(set(outputs)) != len(outputs):
            raise ConfigError("manifest output paths must be distinct")


def load_manifest(path: str | Path, designs_base: Path | None = None) -> BlendManifest:
    """Parse a manifest JSON document and resolve its context and design ids.

    Schema: {"assets_dir": str, "designs": {id: png path}, "jobs": [{
    context_id, hmd_profile_id, design_id, output, lux?, mode?,
    tint_extent?}]}. Relative paths resolve against the manifest location.
    """
    from .profiles import scan_context_library

    path = Path(path)
    base = path.parent
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"manifest not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None

    def resolve(p: str) -> Path:
        candidate = Path(p)
        return candidate if candidate.is_absolute() else (designs_base or base) / candidate

    contexts: dict[str, ContextClip] = {}
    if "assets_dir" in doc:
        contexts = scan_context_library(resolve(doc["assets_dir"]))

    designs: dict[str, DesignAsset] = {}
    for design_id, design_path in (doc.get("designs") or {}).items():
        designs[design_id] = load_design(resolve(design_path), design_id=design_id)

    jobs: list[BlendJob] = []
    for i, raw in enumerate(doc.get("jobs") or []):
        try:
            jobs.append(
                BlendJob(
                    context_id=raw["context_id"],
                    hmd_profile_id=raw["hmd_profile_id"],
                    design_id=raw["design_id"],
                    output_dir=resolve(raw["output"]),
                    lux=float(raw["lux"]) if "lux" in raw and raw["lux"] is not None else None,
                    mode=BlendMode(raw.get("mode", "additive")),
                    tint_extent=TintExtent(raw.get("tint_extent", "full_frame")),
                )
            )
        except KeyError as exc:
            raise ConfigError(f"{path}: job {i}: missing field {exc}") from None
        except ValueError as exc:
            raise ConfigError(f"{path}: job {i}: {exc}") from None

    manifest = BlendManifest(jobs=jobs, contexts=contexts, designs=designs)
    for job in jobs:
        if job.context_id not in contexts:
            raise ConfigError(f"manifest references unknown context {job.context_id!r}")
        if job.design_id not in designs:
            raise ConfigError(f"manifest references unknown design {job.design_id!r}")
    return manifest


@dataclass
class JobReport:
    job: BlendJob
    status: str = "pending"
    frames_done: int = 0
    frames_total: int = 0
    seconds: float = 0.0
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "context_id": self.job.context_id,
            "hmd_profile_id": self.job.hmd_profile_id,
            "design_id": self.job.design_id,
            "output": str(self.job.output_dir),
            "status": self.status,
            "frames_done": self.frames_done,
            "frames_total": self.frames_total,
            "seconds": round(self.seconds, 3),
            "error": self.error,
        }


@dataclass
class ManifestReport:
    jobs: list[JobReport] = field(default_factory=list)

    @property
    def succeeded(self) -> int:
        return sum(1 for j in self.jobs if j.status == "done")

    @property
    def failed(self) -> int:
        return sum(1 for j in self.jobs if j.status == "failed")


def write_sidecar(
    output_dir: Path,
    *,
    context_id: str,
    hmd: HmdProfile,
    camera: CameraProfile,
    design_id: str,
    lux: float,
    mode: BlendMode,
    tint_extent: TintExtent,
    rect: OverlayRect,
    frames: int,
) -> None:
    meta = {
        "context_id": context_id,
        "hmd_profile_id": hmd.id,
        "camera_profile_id": camera.id,
        "design_id": design_id,
        "lux": lux,
        "mode": mode.value,
        "tint_extent": tint_extent.value,
        "rect": {"x": rect.x, "y": rect.y, "w": rect.w, "h": rect.h},
        "frames": frames,
        "fps": camera.fps,
        "tool_version": __version__,
    }
    (output_dir / "metadata.json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")


def run_manifest(
    manifest: BlendManifest,
    registry: ProfileRegistry,
    parallelism: int = 1,
) -> ManifestReport:
    """Render every job in the manifest; per-job failures do not abort siblings.

    Frames are parallelized across a worker pool; each task loads, renders,
    and writes a single frame, so peak residency stays at roughly
    `parallelism` frames. Output bytes are independent of worker count.
    """
    if parallelism < 1:
        raise ConfigError(f"parallelism must be >= 1, got {parallelism}")
    report = ManifestReport()
    prepared = []
    for job in manifest.jobs:
        job_report = JobReport(job=job)
        report.jobs.append(job_report)
        try:
            clip = manifest.contexts[job.context_id]
            camera = registry.camera(clip.camera)
            hmd = registry.hmd(job.hmd_profile_id)
            design = manifest.designs[job.design_id]
            lux = job.lux if job.lux is not None else clip.lighting_lux
            frames = ingest_frames(clip.frames_path)
            renderer = JobRenderer(design, hmd, camera, lux, job.mode, job.tint_extent)
            job.output_dir.mkdir(parents=True, exist_ok=True)
            job_report.frames_total = len(frames)
            prepared.append((job, job_report, clip, camera, hmd, lux, frames, renderer))
        except Exception as exc:  # noqa: BLE001 — job isolation is the contract
            job_report.status = "failed"
            job_report.error = f"{type(exc).__name__}: {exc}"

    def render_one(args) -> None:
        job, job_report, frames, renderer, index = args
        frame = frames.load(index)
        out = renderer.render(frame)
        Image.fromarray(out.pixels).save(job.output_dir / frame_name(index))

    for job, job_report, clip, camera, hmd, lux, frames, renderer in prepared:
        start = time.perf_counter()
        job_report.status = "running"
        tasks = [(job, job_report, frames, renderer, i) for i in range(1, len(frames) + 1)]
        try:
            if parallelism == 1:
                for task in tasks:
                    render_one(task)
                    job_report.frames_done += 1
            else:
                with ThreadPoolExecutor(max_workers=parallelism) as pool:
                    for _ in pool.map(render_one, tasks):
                        job_report.frames_done += 1
            write_sidecar(
                job.output_dir,
                context_id=job.context_id,
                hmd=hmd,
                camera=camera,
                design_id=job.design_id,
                lux=lux,
                mode=job.mode,
                tint_extent=job.tint_extent,
                rect=renderer.rect,
                frames=len(frames),
            )
            job_report.status = "done"
        except Exception as exc:  # noqa: BLE001
            job_report.status = "failed"
            job_report.error = f"{type(exc).__name__}: {exc}"
        job_report.seconds = time.perf_counter() - start
    return report


@dataclass(frozen=True)
class AssemblyResult:
    status: str  # "assembled" | "frames_only"
    path: Path | None = None
    diagnostics: str = ""


def assemble_video(frames_dir: str | Path, fps: float, out_path: str | Path) -> AssemblyResult:
    """Mux a frame sequence with the configured external transcoder.

    Without SIMULATAR_TRANSCODER set this is not an error: frame sequences
    are the canonical output, and the result says so. The transcoder is
    invoked as `<command> <frames_dir> <fps> <out_path>`.
    """
    from .errors import AssemblyError

    frames_dir = Path(frames_dir)
    out_path = Path(out_path)
    ingest_frames(frames_dir)  # validates presence and contiguity
    command = os.environ.get(TRANSCODER_ENV, "").strip()
    if not command:
        return AssemblyResult(status="frames_only", diagnostics=f"{TRANSCODER_ENV} not configured")
    proc = subprocess.run(
        [command, str(frames_dir), str(fps), str(out_path)],
        capture_output=True,
        text=True,
    )
    if proc.returncode != 0:
        raise AssemblyError(
            f"transcoder exited {proc.returncode}: {proc.stderr.strip() or proc.stdout.strip()}"
        )
    return AssemblyResult(status="assembled", path=out_path, diagnostics=proc.stderr.strip())
