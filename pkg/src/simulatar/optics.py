"""Per-pixel optical model for additive see-through displays.

All blending happens in linear light: combiner optics sum radiance, not
gamma-coded values, so sRGB pixels are decoded before any arithmetic and
re-encoded at the end. The model has four stages:

  tint      — the combiner passes only a fraction of real-world light,
              which is exactly a per-channel multiply in linear light;
  washout   — bright ambient light compresses the perceived contrast of
              the virtual image, modeled as compression toward mid-gray;
  opacity   — solid design backgrounds lose effective opacity as ambient
              light rises, modeled by scaling the design alpha;
  composite — additive (display light adds to the scene, black is
              transparent) or classic source-over alpha blending.

Scalar operations work on LinearColor triples; the *_array variants are
the vectorized forms the frame pipeline uses. Both share the same
formulas, so outputs agree bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from .errors import DomainError, ValidationError


class LinearColor(NamedTuple):
    """Linear-light RGB intensities, nominally in [0, 1]."""

    r: float
    g: float
    b: float


class BlendMode(Enum):
    ADDITIVE = "additive"
    ALPHA_OVER = "alpha_over"


class TintExtent(Enum):
    FULL_FRAME = "full_frame"
    OVERLAY_RECT_ONLY = "overlay_rect_only"


@dataclass(frozen=True)
class BlendParams:
    """Resolved per-job blending parameters.

    alpha_scale and contrast_retention come from evaluating the HMD's
    opacity and contrast curves at the context illuminance.
    """

    transmittance: float
    alpha_scale: float
    contrast_retention: float
    mode: BlendMode = BlendMode.ADDITIVE
    tint_extent: TintExtent = TintExtent.FULL_FRAME

    def __post_init__(self):
        if not 0 < self.transmittance <= 1:
            raise ValidationError(f"transmittance must be in (0, 1], got {self.transmittance}")
        if not 0 <= self.alpha_scale <= 1:
            raise ValidationError(f"alpha_scale must be in [0, 1], got {self.alpha_scale}")
        if not 0 <= self.contrast_retention <= 1:
            raise ValidationError(f"contrast_retention must be in [0, 1], got {self.contrast_retention}")
        if not isinstance(self.mode, BlendMode):
            raise ValidationError(f"mode must be a BlendMode, got {self.mode!r}")
        if not isinstance(self.tint_extent, TintExtent):
            raise ValidationError(f"tint_extent must be a TintExtent, got {self.tint_extent!r}")


def srgb_decode(code: float) -> float:
    """sRGB code value in [0, 1] -> linear-light intensity (standard EOTF)."""
    if not 0.0 <= code <= 1.0:
        raise DomainError(f"sRGB code {code} outside [0, 1]")
    if code <= 0.04045:
        return code / 12.92
    return ((code + 0.055) / 1.055) ** 2.4


def srgb_encode(linear: float) -> float:
    """Linear-light intensity in [0, 1] -> sRGB code value (standard OETF)."""
    if not 0.0 <= linear <= 1.0:
        raise DomainError(f"linear value {linear} outside [0, 1]")
    if linear <= 0.0031308:
        return linear * 12.92
    return 1.055 * linear ** (1.0 / 2.4) - 0.055


def srgb_decode_array(codes: np.ndarray) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.float64)
    return np.where(codes <= 0.04045, codes / 12.92, ((codes + 0.055) / 1.055) ** 2.4)


def srgb_encode_array(linear: np.ndarray) -> np.ndarray:
    linear = np.asarray(linear, dtype=np.float64)
    return np.where(linear <= 0.0031308, linear * 12.92, 1.055 * linear ** (1.0 / 2.4) - 0.055)


# Decoding 8-bit frames goes through a 256-entry table: same values as
# srgb_decode(code / 255) for every code, at a fraction of the cost.
DECODE_LUT = np.array([srgb_decode(i / 255.0) for i in range(256)], dtype=np.float64)


def quantize_code(code: float | np.ndarray):
    """[0, 1] sRGB code -> 8-bit value, rounding half up."""
    return np.floor(np.multiply(code, 255.0) + 0.5).astype(np.uint8)


def apply_tint(bg: LinearColor, transmittance: float) -> LinearColor:
    """Attenuate background light by the combiner transmittance.

    A black overlay of opacity (1 - T) over the scene is exactly a
    multiply by T in linear light.
    """
    if not 0 < transmittance <= 1:
        raise DomainError(f"transmittance must be in (0, 1], got {transmittance}")
    return LinearColor(bg.r * transmittance, bg.g * transmittance, bg.b * transmittance)


def wash_out(d: LinearColor, retention: float) -> LinearColor:
    """Compress design channels toward mid-gray 0.5 by the retention factor."""
    if not 0 <= retention <= 1:
        raise DomainError(f"retention must be in [0, 1], got {retention}")

    def chan(v: float) -> float:
        return min(1.0, max(0.0, 0.5 + (v - 0.5) * retention))

    return LinearColor(chan(d.r), chan(d.g), chan(d.b))


def wash_out_array(d: np.ndarray, retention: float) -> np.ndarray:
    return np.clip(0.5 + (d - 0.5) * retention, 0.0, 1.0)


def composite_pixel(
    bg: LinearColor,
    design: LinearColor,
    design_alpha: float,
    params: BlendParams,
) -> LinearColor:
    """Blend one design pixel over one (already tinted) background pixel.

    Additive mode adds the washed-out design light scaled by the effective
    alpha; alpha_over is classic source-over. Output channels are clamped
    to [0, 1].
    """
    if not 0 <= design_alpha <= 1:
        raise DomainError(f"design_alpha must be in [0, 1], got {design_alpha}")
    a_eff = design_alpha * params.alpha_scale
    d = wash_out(design, params.contrast_retention)
    if params.mode is BlendMode.ADDITIVE:
        out = (bg.r + d.r * a_eff, bg.g + d.g * a_eff, bg.b + d.b * a_eff)
    else:
        out = (
            d.r * a_eff + bg.r * (1.0 - a_eff),
            d.g * a_eff + bg.g * (1.0 - a_eff),
            d.b * a_eff + bg.b * (1.0 - a_eff),
        )
    return LinearColor(*(min(1.0, max(0.0, v)) for v in out))


def composite_array(
    bg: np.ndarray,
    design: np.ndarray,
    a_eff: np.ndarray,
    mode: BlendMode,
) -> np.ndarray:
    """Vectorized composite of a washed design block over a tinted background block.

    bg and design are HxWx3 linear float arrays; a_eff is the HxW
    effective alpha (design alpha already scaled, washout already applied
    to design).
    """
    a = a_eff[..., np.newaxis]
    if mode is BlendMode.ADDITIVE:
        out = bg + design * a
    else:
        out = design * a + bg * (1.0 - a)
    return np.clip(out, 0.0, 1.0)
