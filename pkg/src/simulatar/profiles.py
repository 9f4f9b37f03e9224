"""Typed data model for HMD, camera, and context metadata.

Profiles carry everything the render pipeline needs to know about a
simulated headset (canvas size, combiner transmittance, lighting response
curves) and about the capture camera (frame size, diagonal FOV). Built-in
defaults cover the two supported headsets and the GoPro capture profile;
a JSON config file can override or extend them.

Transmittance and the lighting curves are tunable calibration values, not
vendor ground truth; see the README for the calibration notes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .errors import ConfigError, DomainError, ValidationError

Curve = tuple[tuple[float, float], ...]


def _validate_curve(curve: Curve, name: str, owner: str) -> Curve:
    curve = tuple((float(lux), float(val)) for lux, val in curve)
    if len(curve) < 2:
        raise ValidationError(f"{owner}.{name}: needs at least 2 anchors, got {len(curve)}")
    for lux, val in curve:
        if lux <= 0:
            raise ValidationError(f"{owner}.{name}: anchor lux must be > 0, got {lux}")
        if not 0.0 <= val <= 1.0:
            raise ValidationError(f"{owner}.{name}: anchor value {val} outside [0, 1]")
    luxes = [lux for lux, _ in curve]
    if any(b <= a for a, b in zip(luxes, luxes[1:])):
        raise ValidationError(f"{owner}.{name}: anchor lux values must be strictly increasing")
    return curve


def eval_curve(curve: Curve, lux: float) -> float:
    """Evaluate an anchor curve at the given illuminance.

    Interpolates piecewise-linearly in log10(lux) between anchors and
    clamps to the end anchors outside the covered range. Illuminance in
    the studied conditions spans two orders of magnitude, so linear-in-lux
    interpolation would collapse all low-light variation.
    """
    if lux <= 0:
        raise DomainError(f"lux must be > 0, got {lux}")
    log_lux = math.log10(lux)
    if log_lux <= math.log10(curve[0][0]):
        return curve[0][1]
    if log_lux >= math.log10(curve[-1][0]):
        return curve[-1][1]
    for (lux_a, val_a), (lux_b, val_b) in zip(curve, curve[1:]):
        la, lb = math.log10(lux_a), math.log10(lux_b)
        if la <= log_lux <= lb:
            t = (log_lux - la) / (lb - la)
            return val_a + t * (val_b - val_a)
    raise AssertionError("unreachable: log_lux inside anchor range but no segment matched")


@dataclass(frozen=True)
class HmdProfile:
    """Optical and display parameters of a simulated headset."""

    id: str
    display_resolution: tuple[int, int]
    diagonal_fov_deg: float
    transmittance: float
    contrast_curve: Curve
    opacity_curve: Curve
    optics_label: str = ""
    display_label: str = ""

    def __post_init__(self):
        w, h = self.display_resolution
        if w <= 0 or h <= 0:
            raise ValidationError(f"{self.id}.display_resolution: components must be > 0, got {w}x{h}")
        if not 0 < self.diagonal_fov_deg < 180:
            raise ValidationError(
                f"{self.id}.diagonal_fov_deg: must be in (0, 180), got {self.diagonal_fov_deg}"
            )
        if not 0 < self.transmittance <= 1:
            raise ValidationError(
                f"{self.id}.transmittance: must be in (0, 1], got {self.transmittance}"
            )
        object.__setattr__(self, "contrast_curve", _validate_curve(self.contrast_curve, "contrast_curve", self.id))
        object.__setattr__(self, "opacity_curve", _validate_curve(self.opacity_curve, "opacity_curve", self.id))

    @property
    def aspect(self) -> float:
        w, h = self.display_resolution
        return w / h


class Projection(Enum):
    RECTILINEAR = "rectilinear"


@dataclass(frozen=True)
class CameraProfile:
    """Rectilinear capture model of the first-person-view camera."""

    id: str
    frame_resolution: tuple[int, int]
    diagonal_fov_deg: float
    fps: float = 30.0
    projection: Projection = Projection.RECTILINEAR

    def __post_init__(self):
        w, h = self.frame_resolution
        if w <= 0 or h <= 0:
            raise ValidationError(f"{self.id}.frame_resolution: components must be > 0, got {w}x{h}")
        if not 0 < self.diagonal_fov_deg < 180:
            raise ValidationError(
                f"{self.id}.diagonal_fov_deg: must be in (0, 180), got {self.diagonal_fov_deg}"
            )
        if self.projection is not Projection.RECTILINEAR:
            raise ValidationError(f"{self.id}.projection: only rectilinear is supported")

    @property
    def aspect(self) -> float:
        w, h = self.frame_resolution
        return w / h


class Location(Enum):
    INDOOR = "indoor"
    OUTDOOR = "outdoor"
    TRANSPORT = "transport"


class Mobility(Enum):
    SITTING = "sitting"
    WALKING = "walking"


class LightingClass(Enum):
    LOW = "low"
    HIGH = "high"


@dataclass(frozen=True)
class ContextClip:
    """Metadata for one first-person context clip (frames live on disk)."""

    id: str
    frames_path: Path
    location: Location
    mobility: Mobility
    lighting_lux: float
    lighting_class: LightingClass
    camera: str

    def __post_init__(self):
        if self.lighting_lux <= 0:
            raise ValidationError(f"{self.id}.lighting_lux: must be > 0, got {self.lighting_lux}")
        object.__setattr__(self, "frames_path", Path(self.frames_path))


# Built-in profile defaults. Resolutions are the published per-eye panel
# sizes; diagonal FOV and transmittance are public vendor figures and
# plausible combiner transmissions respectively — calibration values, not
# measurements. The curves span the studied 100-10000 lux range, with the
# hl2 contrast curve dropping harder to reflect its weaker contrast in
# bright ambient light.
DEFAULT_OPACITY_CURVE: Curve = ((100.0, 1.0), (10000.0, 0.6))

_BUILTIN_HMDS = (
    HmdProfile(
        id="hl2",
        display_resolution=(1440, 936),
        diagonal_fov_deg=52.0,
        transmittance=0.40,
        contrast_curve=((100.0, 1.0), (10000.0, 0.3)),
        opacity_curve=DEFAULT_OPACITY_CURVE,
        optics_label="Waveguides",
        display_label="Laser Beam Scanning",
    ),
    HmdProfile(
        id="nreal-light",
        display_resolution=(1920, 1080),
        diagonal_fov_deg=52.0,
        transmittance=0.25,
        contrast_curve=((100.0, 1.0), (10000.0, 0.6)),
        opacity_curve=DEFAULT_OPACITY_CURVE,
        optics_label="Birdbath",
        display_label="OLED",
    ),
)

_BUILTIN_CAMERAS = (
    CameraProfile(
        id="gopro-hero10-linear",
        frame_resolution=(2704, 1520),
        diagonal_fov_deg=95.0,
        fps=50.0,
    ),
)


@dataclass(frozen=True)
class ProfileRegistry:
    """Immutable lookup of HMD and camera profiles; safe to share across workers."""

    hmd_profiles: dict[str, HmdProfile] = field(default_factory=dict)
    camera_profiles: dict[str, CameraProfile] = field(default_factory=dict)

    def hmd(self, profile_id: str) -> HmdProfile:
        try:
            return self.hmd_profiles[profile_id]
        except KeyError:
            raise ConfigError(f"unknown HMD profile: {profile_id!r}") from None

    def camera(self, profile_id: str) -> CameraProfile:
        try:
            return self.camera_profiles[profile_id]
        except KeyError:
            raise ConfigError(f"unknown camera profile: {profile_id!r}") from None


def _parse_resolution(raw, field_name: str, owner: str) -> tuple[int, int]:
    if not isinstance(raw, (list, tuple)) or len(raw) != 2:
        raise ValidationError(f"{owner}.{field_name}: expected [width, height], got {raw!r}")
    return int(raw[0]), int(raw[1])


def _parse_curve(raw, field_name: str, owner: str) -> Curve:
    if not isinstance(raw, list):
        raise ValidationError(f"{owner}.{field_name}: expected list of [lux, value] pairs, got {raw!r}")
    try:
        return tuple((float(p[0]), float(p[1])) for p in raw)
    except (TypeError, IndexError, ValueError):
        raise ValidationError(f"{owner}.{field_name}: malformed anchor pair in {raw!r}") from None


def _hmd_from_config(profile_id: str, raw: dict, base: HmdProfile | None) -> HmdProfile:
    def pick(key, default):
        return raw[key] if key in raw else default

    if base is None and not {"display_resolution", "diagonal_fov_deg", "transmittance"} <= raw.keys():
        raise ValidationError(
            f"{profile_id}: new HMD profiles must define display_resolution, diagonal_fov_deg, transmittance"
        )
    return HmdProfile(
        id=profile_id,
        display_resolution=(
            _parse_resolution(raw["display_resolution"], "display_resolution", profile_id)
            if "display_resolution" in raw
            else base.display_resolution
        ),
        diagonal_fov_deg=float(pick("diagonal_fov_deg", base.diagonal_fov_deg if base else 0)),
        transmittance=float(pick("transmittance", base.transmittance if base else 0)),
        contrast_curve=(
            _parse_curve(raw["contrast_curve"], "contrast_curve", profile_id)
            if "contrast_curve" in raw
            else (base.contrast_curve if base else ((100.0, 1.0), (10000.0, 0.5)))
        ),
        opacity_curve=(
            _parse_curve(raw["opacity_curve"], "opacity_curve", profile_id)
            if "opacity_curve" in raw
            else (base.opacity_curve if base else DEFAULT_OPACITY_CURVE)
        ),
        optics_label=str(pick("optics_label", base.optics_label if base else "")),
        display_label=str(pick("display_label", base.display_label if base else "")),
    )


def _camera_from_config(profile_id: str, raw: dict, base: CameraProfile | None) -> CameraProfile:
    def pick(key, default):
        return raw[key] if key in raw else default

    if base is None and not {"frame_resolution", "diagonal_fov_deg"} <= raw.keys():
        raise ValidationError(
            f"{profile_id}: new camera profiles must define frame_resolution and diagonal_fov_deg"
        )
    return CameraProfile(
        id=profile_id,
        frame_resolution=(
            _parse_resolution(raw["frame_resolution"], "frame_resolution", profile_id)
            if "frame_resolution" in raw
            else base.frame_resolution
        ),
        diagonal_fov_deg=float(pick("diagonal_fov_deg", base.diagonal_fov_deg if base else 0)),
        fps=float(pick("fps", base.fps if base else 30.0)),
    )


def load_profiles(config_path: str | Path | None = None) -> ProfileRegistry:
    """Build the profile registry: built-in defaults merged with user overrides.

    User values win on key collision. The config file is a JSON document
    with top-level "hmd_profiles" and "camera_profiles" objects keyed by
    profile id; curves are arrays of [lux, value] pairs.
    """
    hmds = {p.id: p for p in _BUILTIN_HMDS}
    cameras = {p.id: p for p in _BUILTIN_CAMERAS}

    if config_path is not None:
        path = Path(config_path)
        if not path.is_file():
            raise ConfigError(f"profile config not found: {path}")
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
        if not isinstance(doc, dict):
            raise ConfigError(f"{path}: top level must be an object")
        for profile_id, raw in (doc.get("hmd_profiles") or {}).items():
            if not isinstance(raw, dict):
                raise ConfigError(f"{path}: hmd_profiles.{profile_id} must be an object")
            hmds[profile_id] = _hmd_from_config(profile_id, raw, hmds.get(profile_id))
        for profile_id, raw in (doc.get("camera_profiles") or {}).items():
            if not isinstance(raw, dict):
                raise ConfigError(f"{path}: camera_profiles.{profile_id} must be an object")
            cameras[profile_id] = _camera_from_config(profile_id, raw, cameras.get(profile_id))

    return ProfileRegistry(hmd_profiles=hmds, camera_profiles=cameras)


def load_context_meta(context_dir: str | Path) -> ContextClip:
    """Read one context clip's meta.json from its asset directory."""
    context_dir = Path(context_dir)
    meta_path = context_dir / "meta.json"
    if not meta_path.is_file():
        raise ConfigError(f"context {context_dir.name}: missing meta.json")
    try:
        raw = json.loads(meta_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{meta_path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    try:
        return ContextClip(
            id=str(raw.get("id", context_dir.name)),
            frames_path=context_dir / "frames",
            location=Location(raw["location"]),
            mobility=Mobility(raw["mobility"]),
            lighting_lux=float(raw["lighting_lux"]),
            lighting_class=LightingClass(raw["lighting_class"]),
            camera=str(raw["camera"]),
        )
    except KeyError as exc:
        raise ConfigError(f"{meta_path}: missing field {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"{meta_path}: {exc}") from None


def scan_context_library(assets_dir: str | Path) -> dict[str, ContextClip]:
    """Scan assets/contexts/<id>/ directories into a clip registry, ordered by id."""
    contexts_dir = Path(assets_dir) / "contexts"
    clips: dict[str, ContextClip] = {}
    if not contexts_dir.is_dir():
        return clips
    for entry in sorted(contexts_dir.iterdir()):
        if entry.is_dir() and (entry / "meta.json").is_file():
            clip = load_context_meta(entry)
            clips[clip.id] = clip
    return clips
