"""Local HTTP service: context library, profiles, uploads, blend jobs, previews.

Single-designer desktop tool: binds localhost by default, no auth. One
render worker pool serves both batch jobs and interactive previews;
preview tasks jump the queue ahead of not-yet-started batch frames so the
lux slider stays responsive while a job renders.

Previews and batch jobs share the JobRenderer code path, so a preview of
frame n is byte-identical to the batch output of the same frame.

Layout on disk:
    <assets>/contexts/<id>/{meta.json, frames/}     read-only library
    <data>/designs/<id>.png                          uploaded designs
    <data>/jobs/<id>/{job.json, frames/}             job outputs
"""

from __future__ import annotations

import heapq
import io
import itertools
import json
import threading
import uuid
from contextlib import asynccontextmanager
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException, UploadFile
from fastapi.responses import FileResponse, JSONResponse, Response
from fastapi.staticfiles import StaticFiles
from PIL import Image

from . import __version__
from .errors import SimulatarError
from .optics import BlendMode, TintExtent
from .pipeline import DesignAsset, JobRenderer, assemble_video, frame_name, ingest_frames, write_sidecar
from .profiles import ContextClip, ProfileRegistry, load_profiles, scan_context_library

DEFAULT_MAX_UPLOAD = 10 * 1024 * 1024

PREVIEW_PRIORITY = 0
BATCH_PRIORITY = 1


class RenderPool:
    """Priority worker pool: previews preempt queued (not running) batch frames."""

    def __init__(self, workers: int = 2):
        self._heap: list = []
        self._counter = itertools.count()
        self._cv = threading.Condition()
        self._closed = False
        self._threads = [
            threading.Thread(target=self._run, name=f"render-{i}", daemon=True) for i in range(workers)
        ]
        for t in self._threads:
            t.start()

    def submit(self, priority: int, fn, *args):
        done = threading.Event()
        box: dict = {}

        def task():
            try:
                box["result"] = fn(*args)
            except BaseException as exc:  # noqa: BLE001 — delivered to the waiter
                box["error"] = exc
            finally:
                done.set()

        with self._cv:
            if self._closed:
                raise RuntimeError("render pool is closed")
            heapq.heappush(self._heap, (priority, next(self._counter), task))
            self._cv.notify()

        def wait(timeout=None):
            if not done.wait(timeout):
                raise TimeoutError("render task timed out")
            if "error" in box:
                raise box["error"]
            return box.get("result")

        return wait

    def _run(self):
        while True:
            with self._cv:
                while not self._heap and not self._closed:
                    self._cv.wait()
                if self._closed and not self._heap:
                    return
                _, _, task = heapq.heappop(self._heap)
            task()

    def close(self):
        with self._cv:
            self._closed = True
            self._cv.notify_all()


@dataclass
class JobRecord:
    id: str
    spec: dict
    state: str = "queued"  # queued -> running -> done | failed
    frames_done: int = 0
    frames_total: int = 0
    error: str | None = None
    created_at: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "spec": self.spec,
            "state": self.state,
            "progress": {"done": self.frames_done, "total": self.frames_total},
            "error": self.error,
            "created_at": self.created_at,
        }


class ServiceState:
    """Owns registries, asset scans, uploads, and the job store."""

    def __init__(
        self,
        assets_dir: Path,
        data_dir: Path,
        config_path: Path | None = None,
        max_upload_bytes: int = DEFAULT_MAX_UPLOAD,
        workers: int = 2,
    ):
        self.registry: ProfileRegistry = load_profiles(config_path)
        self.assets_dir = Path(assets_dir)
        self.data_dir = Path(data_dir)
        self.designs_dir = self.data_dir / "designs"
        self.jobs_dir = self.data_dir / "jobs"
        self.designs_dir.mkdir(parents=True, exist_ok=True)
        self.jobs_dir.mkdir(parents=True, exist_ok=True)
        self.max_upload_bytes = max_upload_bytes
        self.contexts: dict[str, ContextClip] = scan_context_library(self.assets_dir)
        self.pool = RenderPool(workers=workers)
        self._jobs: dict[str, JobRecord] = {}
        self._lock = threading.Lock()
        self._restore_jobs()

    # -- persistence --------------------------------------------------------

    def _job_json(self, job_id: str) -> Path:
        return self.jobs_dir / job_id / "job.json"

    def _persist(self, job: JobRecord) -> None:
        path = self._job_json(job.id)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(job.to_dict(), indent=2) + "\n", encoding="utf-8")

    def _restore_jobs(self) -> None:
        for job_json in sorted(self.jobs_dir.glob("*/job.json")):
            try:
                raw = json.loads(job_json.read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError):
                continue
            record = JobRecord(
                id=raw["id"],
                spec=raw.get("spec", {}),
                state=raw.get("state", "failed"),
                frames_done=raw.get("progress", {}).get("done", 0),
                frames_total=raw.get("progress", {}).get("total", 0),
                error=raw.get("error"),
                created_at=raw.get("created_at", ""),
            )
            # a process restart cannot resume in-flight work
            if record.state in ("queued", "running"):
                record.state = "failed"
                record.error = "interrupted by service restart"
            self._jobs[record.id] = record

    # -- lookups -------------------------------------------------------------

    def job(self, job_id: str) -> JobRecord:
        with self._lock:
            record = self._jobs.get(job_id)
        if record is None:
            raise HTTPException(status_code=404, detail=f"unknown job {job_id!r}")
        return record

    def design_path(self, design_id: str) -> Path:
        path = self.designs_dir / f"{design_id}.png"
        if not path.is_file():
            raise HTTPException(status_code=404, detail=f"unknown design {design_id!r}")
        return path

    def context(self, context_id: str) -> ContextClip:
        clip = self.contexts.get(context_id)
        if clip is None:
            raise HTTPException(status_code=404, detail=f"unknown context {context_id!r}")
        return clip

    def load_design_asset(self, design_id: str) -> DesignAsset:
        path = self.design_path(design_id)
        try:
            with Image.open(path) as im:
                return DesignAsset(id=design_id, pixels=np.asarray(im.convert("RGBA")))
        except OSError as exc:
            raise HTTPException(status_code=422, detail=f"design {design_id!r} is not decodable: {exc}") from None

    def renderer_for(self, spec: dict) -> tuple[JobRenderer, ContextClip]:
        clip = self.context(spec["context_id"])
        camera = self.registry.camera_profiles.get(clip.camera)
        if camera is None:
            raise HTTPException(status_code=422, detail=f"context camera {clip.camera!r} not in registry")
        hmd = self.registry.hmd_profiles.get(spec["profile_id"])
        if hmd is None:
            raise HTTPException(status_code=404, detail=f"unknown profile {spec['profile_id']!r}")
        design = self.load_design_asset(spec["design_id"])
        lux = spec.get("lux")
        if lux is None:
            lux = clip.lighting_lux
        try:
            lux = float(lux)
        except (TypeError, ValueError):
            raise HTTPException(status_code=422, detail=f"invalid lux {lux!r}") from None
        if lux <= 0:
            raise HTTPException(status_code=422, detail=f"lux must be > 0, got {lux}")
        try:
            mode = BlendMode(spec.get("mode", "additive"))
            tint_extent = TintExtent(spec.get("tint_extent", "full_frame"))
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        try:
            renderer = JobRenderer(design, hmd, camera, lux, mode, tint_extent)
        except SimulatarError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        return renderer, clip

    # -- jobs ------------------------------------------------------------------

    def submit_job(self, spec: dict) -> JobRecord:
        renderer, clip = self.renderer_for(spec)  # validates ids up front
        frames = ingest_frames(clip.frames_path)
        job_id = uuid.uuid4().hex[:12]
        record = JobRecord(id=job_id, spec=spec, frames_total=len(frames))
        with self._lock:
            self._jobs[job_id] = record
        out_dir = self.jobs_dir / job_id / "frames"
        out_dir.mkdir(parents=True, exist_ok=True)
        self._persist(record)

        lock = threading.Lock()
        started = threading.Event()

        def render_one(index: int):
            if not started.is_set():
                with self._lock:
                    if record.state == "queued":
                        record.state = "running"
                started.set()
            frame = frames.load(index)
            out = renderer.render(frame)
            Image.fromarray(out.pixels).save(out_dir / frame_name(index))
            with lock:
                record.frames_done += 1
                done = record.frames_done
            if done == record.frames_total:
                write_sidecar(
                    out_dir.parent,
                    context_id=clip.id,
                    hmd=renderer.hmd,
                    camera=renderer.camera,
                    design_id=spec["design_id"],
                    lux=renderer.lux,
                    mode=renderer.mode,
                    tint_extent=renderer.tint_extent,
                    rect=renderer.rect,
                    frames=record.frames_total,
                )
                with self._lock:
                    record.state = "done"
                self._persist(record)
                self._try_assemble(record)

        def run_frame(index: int):
            try:
                render_one(index)
            except Exception as exc:  # noqa: BLE001 — job failure is recorded, not raised
                with self._lock:
                    record.state = "failed"
                    record.error = f"{type(exc).__name__}: {exc}"
                self._persist(record)

        for i in range(1, len(frames) + 1):
            self.pool.submit(BATCH_PRIORITY, run_frame, i)
        return record

    def _try_assemble(self, record: JobRecord) -> None:
        frames_dir = self.jobs_dir / record.id / "frames"
        clip = self.contexts.get(record.spec.get("context_id", ""))
        fps = 30.0
        if clip is not None:
            camera = self.registry.camera_profiles.get(clip.camera)
            if camera is not None:
                fps = camera.fps
        try:
            assemble_video(frames_dir, fps, self.jobs_dir / record.id / "video.mp4")
        except SimulatarError:
            pass  # frames remain the canonical output

    def render_preview(self, spec: dict, frame_index: int) -> bytes:
        renderer, clip = self.renderer_for(spec)
        frames = ingest_frames(clip.frames_path)
        if not 1 <= frame_index <= len(frames):
            raise HTTPException(
                status_code=404, detail=f"frame {frame_index} out of range 1..{len(frames)}"
            )

        def work() -> bytes:
            out = renderer.render(frames.load(frame_index))
            buf = io.BytesIO()
            Image.fromarray(out.pixels).save(buf, format="PNG")
            return buf.getvalue()

        return self.pool.submit(PREVIEW_PRIORITY, work)(timeout=120)


API_SCHEMA = {
    "service": "simulatar",
    "version": __version__,
    "endpoints": {
        "GET /api/contexts": "list context clips (id, location, mobility, lighting_lux, lighting_class, camera, frames, thumbnail)",
        "GET /api/contexts/{id}/thumbnail.png": "first frame as PNG",
        "GET /api/profiles": "HMD and camera profile registry",
        "POST /api/designs": "multipart PNG upload; 201 {id}; 415 non-PNG; 413 oversize",
        "POST /api/jobs": "{context_id, profile_id, design_id, lux?, mode?, tint_extent?} -> {id}",
        "GET /api/jobs/{id}": "job record with state and progress",
        "GET /api/jobs/{id}/frames/{n}.png": "rendered frame n (1-based)",
        "GET /api/jobs/{id}/video": "assembled container when the transcoder produced one",
        "POST /api/preview": "{context_id, frame_index, profile_id, design_id, lux, mode?, tint_extent?} -> PNG",
        "GET /api/schema": "this document",
    },
}


def create_app(
    assets_dir: Path,
    data_dir: Path,
    config_path: Path | None = None,
    max_upload_bytes: int = DEFAULT_MAX_UPLOAD,
    workers: int = 2,
    static_dir: Path | None = None,
) -> FastAPI:
    state = ServiceState(
        assets_dir=assets_dir,
        data_dir=data_dir,
        config_path=config_path,
        max_upload_bytes=max_upload_bytes,
        workers=workers,
    )

    @asynccontextmanager
    async def lifespan(_app):
        yield
        state.pool.close()

    app = FastAPI(title="simulatar", version=__version__, lifespan=lifespan)
    app.state.service = state

    @app.get("/api/schema")
    def get_schema():
        return API_SCHEMA

    @app.get("/api/contexts")
    def get_contexts():
        out = []
        for context_id in sorted(state.contexts):
            clip = state.contexts[context_id]
            try:
                frame_count = len(ingest_frames(clip.frames_path))
            except SimulatarError:
                frame_count = 0
            out.append(
                {
                    "id": clip.id,
                    "location": clip.location.value,
                    "mobility": clip.mobility.value,
                    "lighting_lux": clip.lighting_lux,
                    "lighting_class": clip.lighting_class.value,
                    "camera": clip.camera,
                    "frames": frame_count,
                    "thumbnail": f"/api/contexts/{clip.id}/thumbnail.png",
                }
            )
        return out

    @app.get("/api/contexts/{context_id}/thumbnail.png")
    def get_thumbnail(context_id: str):
        clip = state.context(context_id)
        try:
            frames = ingest_frames(clip.frames_path)
        except SimulatarError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from None
        return FileResponse(frames.path(1), media_type="image/png")

    @app.get("/api/profiles")
    def get_profiles():
        return {
            "hmd_profiles": {
                p.id: {
                    "display_resolution": list(p.display_resolution),
                    "diagonal_fov_deg": p.diagonal_fov_deg,
                    "transmittance": p.transmittance,
                    "contrast_curve": [list(a) for a in p.contrast_curve],
                    "opacity_curve": [list(a) for a in p.opacity_curve],
                    "optics_label": p.optics_label,
                    "display_label": p.display_label,
                }
                for p in state.registry.hmd_profiles.values()
            },
            "camera_profiles": {
                p.id: {
                    "frame_resolution": list(p.frame_resolution),
                    "diagonal_fov_deg": p.diagonal_fov_deg,
                    "fps": p.fps,
                    "projection": p.projection.value,
                }
                for p in state.registry.camera_profiles.values()
            },
        }

    @app.post("/api/designs", status_code=201)
    async def upload_design(file: UploadFile):
        data = await file.read()
        if len(data) > state.max_upload_bytes:
            raise HTTPException(status_code=413, detail=f"upload exceeds {state.max_upload_bytes} bytes")
        if not data.startswith(b"\x89PNG\r\n\x1a\n"):
            raise HTTPException(status_code=415, detail="designs must be PNG")
        design_id = uuid.uuid4().hex[:12]
        (state.designs_dir / f"{design_id}.png").write_bytes(data)
        return {"id": design_id}

    @app.post("/api/jobs", status_code=201)
    def create_job(spec: dict):
        for required in ("context_id", "profile_id", "design_id"):
            if required not in spec:
                raise HTTPException(status_code=422, detail=f"missing field {required!r}")
        record = state.submit_job(spec)
        return {"id": record.id}

    @app.get("/api/jobs/{job_id}")
    def get_job(job_id: str):
        record = state.job(job_id)
        body = record.to_dict()
        if record.state == "done":
            body["frames_url"] = f"/api/jobs/{job_id}/frames"
            if (state.jobs_dir / job_id / "video.mp4").is_file():
                body["video_url"] = f"/api/jobs/{job_id}/video"
        return body

    @app.get("/api/jobs/{job_id}/frames/{index}.png")
    def get_job_frame(job_id: str, index: int):
        record = state.job(job_id)
        path = state.jobs_dir / record.id / "frames" / frame_name(index)
        if not path.is_file():
            raise HTTPException(status_code=404, detail=f"frame {index} not rendered")
        return FileResponse(path, media_type="image/png")

    @app.get("/api/jobs/{job_id}/video")
    def get_job_video(job_id: str):
        record = state.job(job_id)
        path = state.jobs_dir / record.id / "video.mp4"
        if not path.is_file():
            raise HTTPException(status_code=404, detail="no assembled video for this job")
        return FileResponse(path, media_type="video/mp4")

    @app.post("/api/preview")
    def preview(spec: dict):
        for required in ("context_id", "profile_id", "design_id", "frame_index"):
            if required not in spec:
                raise HTTPException(status_code=422, detail=f"missing field {required!r}")
        try:
            frame_index = int(spec["frame_index"])
        except (TypeError, ValueError):
            raise HTTPException(status_code=422, detail=f"invalid frame_index {spec['frame_index']!r}") from None
        png = state.render_preview(spec, frame_index)
        return Response(content=png, media_type="image/png")

    @app.exception_handler(SimulatarError)
    def simulatar_error_handler(_request, exc: SimulatarError):
        return JSONResponse(status_code=422, content={"detail": str(exc), "category": exc.category})

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="webui")

    return app
