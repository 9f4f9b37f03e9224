"""FOV math for rectilinear cameras and HMD canvas placement.

Rectilinear projection puts pixel position proportional to tan of the
view angle, so FOV arithmetic happens in tan space: the diagonal FOV
decomposes into horizontal/vertical components along the aspect ratio,
and the fraction of the camera frame subtended by the HMD canvas is a
ratio of half-angle tangents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AspectMismatchError, DomainError, GeometryError
from .optics import DECODE_LUT
from .profiles import CameraProfile, HmdProfile

# Relative slack when checking the rectilinear consistency invariant and
# when comparing HMD FOV against camera FOV.
_TAN_EPS = 1e-9


@dataclass(frozen=True)
class FovSpec:
    """Horizontal, vertical, and diagonal FOV of one rectilinear view."""

    h_fov_deg: float
    v_fov_deg: float
    d_fov_deg: float
    aspect: float

    def __post_init__(self):
        for name, angle in (("h_fov_deg", self.h_fov_deg), ("v_fov_deg", self.v_fov_deg), ("d_fov_deg", self.d_fov_deg)):
            if not 0 < angle < 180:
                raise DomainError(f"{name} must be in (0, 180), got {angle}")
        th = math.tan(math.radians(self.h_fov_deg / 2))
        tv = math.tan(math.radians(self.v_fov_deg / 2))
        td = math.tan(math.radians(self.d_fov_deg / 2))
        if abs(td * td - (th * th + tv * tv)) > _TAN_EPS * max(1.0, td * td):
            raise GeometryError(
                f"inconsistent FOV triple: tan(d/2)^2={td * td:.12f} != "
                f"tan(h/2)^2+tan(v/2)^2={th * th + tv * tv:.12f}"
            )

    @property
    def tan_half_h(self) -> float:
        return math.tan(math.radians(self.h_fov_deg / 2))

    @property
    def tan_half_v(self) -> float:
        return math.tan(math.radians(self.v_fov_deg / 2))


@dataclass(frozen=True)
class OverlayRect:
    """Pixel region of the camera frame subtended by the HMD canvas."""

    x: int
    y: int
    w: int
    h: int

    @property
    def aspect(self) -> float:
        return self.w / self.h


def fov_from_diagonal(d_fov_deg: float, aspect: float) -> FovSpec:
    """Decompose a diagonal FOV into h/v components for a given aspect ratio.

    tan(h/2) = tan(d/2) * w / sqrt(w^2 + h^2), and analogously for v; valid
    because rectilinear projection keeps pixel offsets proportional to tan.
    """
    if not 0 < d_fov_deg < 180:
        raise DomainError(f"d_fov_deg must be in (0, 180), got {d_fov_deg}")
    if aspect <= 0:
        raise DomainError(f"aspect must be > 0, got {aspect}")
    tan_d = math.tan(math.radians(d_fov_deg / 2))
    diag = math.sqrt(aspect * aspect + 1.0)
    tan_h = tan_d * aspect / diag
    tan_v = tan_d * 1.0 / diag
    return FovSpec(
        h_fov_deg=math.degrees(2 * math.atan(tan_h)),
        v_fov_deg=math.degrees(2 * math.atan(tan_v)),
        d_fov_deg=d_fov_deg,
        aspect=aspect,
    )


def _round_half_away(x: float) -> int:
    # Extents round half away from zero so golden tests stay bit-stable.
    return int(math.floor(x + 0.5)) if x >= 0 else -int(math.floor(-x + 0.5))


def overlay_rect(camera: CameraProfile, hmd: HmdProfile) -> OverlayRect:
    """Compute where the HMD's virtual canvas lands inside the camera frame.

    The width fraction is the ratio of half-angle tangents; the rect is
    centered (origin floor of the margin) with extents rounded half away
    from zero.
    """
    cam_fov = fov_from_diagonal(camera.diagonal_fov_deg, camera.aspect)
    hmd_fov = fov_from_diagonal(hmd.diagonal_fov_deg, hmd.aspect)
    w_frac = hmd_fov.tan_half_h / cam_fov.tan_half_h
    h_frac = hmd_fov.tan_half_v / cam_fov.tan_half_v
    if w_frac > 1 + _TAN_EPS or h_frac > 1 + _TAN_EPS:
        raise GeometryError(
            f"HMD FOV exceeds camera FOV: width fraction {w_frac:.4f}, height fraction {h_frac:.4f} "
            f"(cannot simulate a display wider than the capture)"
        )
    frame_w, frame_h = camera.frame_resolution
    w = min(_round_half_away(w_frac * frame_w), frame_w)
    h = min(_round_half_away(h_frac * frame_h), frame_h)
    x = (frame_w - w) // 2
    y = (frame_h - h) // 2
    return OverlayRect(x=x, y=y, w=w, h=h)


def viewing_distance(monitor_width_cm: float, camera_h_fov_deg: float) -> float:
    """Seat distance at which a monitor subtends the camera's horizontal FOV.

    Sitting at this distance gives the 1:1 match between the viewer's
    physical FOV and the FOV captured in the context footage.
    """
    if monitor_width_cm <= 0:
        raise DomainError(f"monitor_width_cm must be > 0, got {monitor_width_cm}")
    if not 0 < camera_h_fov_deg < 180:
        raise DomainError(f"camera_h_fov_deg must be in (0, 180), got {camera_h_fov_deg}")
    return (monitor_width_cm / 2) / math.tan(math.radians(camera_h_fov_deg / 2))


def resample_design(design, rect: OverlayRect) -> tuple[np.ndarray, np.ndarray, np.ndarray | None]:
    """Resample a design canvas to the overlay rect size.

    `design` provides 8-bit RGBA `pixels` and an optional boolean
    `background_mask`. Color is interpolated bilinearly in linear light,
    alpha linearly; the mask resamples as a float coverage map. Returns
    (linear_rgb HxWx3, alpha HxW, mask HxW or None).
    """
    rgba = design.pixels
    background_mask = design.background_mask
    rect_w, rect_h = rect.w, rect.h
    src_h, src_w = rgba.shape[:2]
    src_aspect = src_w / src_h
    dst_aspect = rect_w / rect_h
    if abs(src_aspect - dst_aspect) > 0.02 * dst_aspect:
        raise AspectMismatchError(
            f"design canvas aspect {src_aspect:.4f} does not match overlay rect aspect "
            f"{dst_aspect:.4f} within 2%; supply a canvas matching the HMD resolution"
        )

    rgb_lin = DECODE_LUT[rgba[:, :, :3]]
    alpha = rgba[:, :, 3].astype(np.float64) / 255.0

    if rect_w == src_w and rect_h == src_h:
        mask = background_mask.astype(np.float64) if background_mask is not None else None
        return rgb_lin, alpha, mask

    # Pixel-center mapping: target center (i + 0.5)/N maps to the same
    # normalized position in the source, clamped at the borders.
    sx = (np.arange(rect_w, dtype=np.float64) + 0.5) * (src_w / rect_w) - 0.5
    sy = (np.arange(rect_h, dtype=np.float64) + 0.5) * (src_h / rect_h) - 0.5
    sx = np.clip(sx, 0.0, src_w - 1.0)
    sy = np.clip(sy, 0.0, src_h - 1.0)
    x0 = np.floor(sx).astype(np.intp)
    y0 = np.floor(sy).astype(np.intp)
    x1 = np.minimum(x0 + 1, src_w - 1)
    y1 = np.minimum(y0 + 1, src_h - 1)
    fx = (sx - x0)[np.newaxis, :]
    fy = (sy - y0)[:, np.newaxis]

    def bilerp(plane: np.ndarray) -> np.ndarray:
        top = plane[y0[:, None], x0[None, :]] * (1 - fx) + plane[y0[:, None], x1[None, :]] * fx
        bot = plane[y1[:, None], x0[None, :]] * (1 - fx) + plane[y1[:, None], x1[None, :]] * fx
        return top * (1 - fy) + bot * fy

    out_rgb = np.stack([bilerp(rgb_lin[:, :, c]) for c in range(3)], axis=-1)
    out_alpha = bilerp(alpha)
    out_mask = bilerp(background_mask.astype(np.float64)) if background_mask is not None else None
    return out_rgb, out_alpha, out_mask
