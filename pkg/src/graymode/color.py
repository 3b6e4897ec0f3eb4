"""Exact color arithmetic: linear RGB-to-gray projection and CIE L* luminance.

Gray levels come from a weighted channel sum truncated to an integer; the
truncation adds a 1e-9 epsilon first so that weights which sum to 1 only up
to float rounding still map (v, v, v) to v (without it, white can land on
254). L* uses the sRGB linearization with per-channel lookup tables so a
full-cube pass costs two additions and one cube root per color.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

L = 256

# Absorbs float rounding in the weighted sum before truncation.
TRUNCATION_EPS = 1e-9

# Tolerance on |lambda_r + lambda_g + lambda_b - 1|; larger deviations are
# rejected, never silently renormalized (renormalizing would change K).
WEIGHT_SUM_TOL = 1e-9

# CIE L* constants, low branch applies at or below the Y threshold.
LSTAR_Y_THRESHOLD = 0.008856
LSTAR_LOW_SLOPE = 903.292

# Relative-luminance coefficients (Rec. 709 primaries).
_Y_RED = 0.2126
_Y_GREEN = 0.7152
_Y_BLUE = 0.0722


class EmptyImageError(ValueError):
    """Raised when an image operation receives a zero-pixel image."""


def _srgb_linearize(channel: np.ndarray) -> np.ndarray:
    c = channel / 255.0
    return np.where(c > 0.04045, ((c + 0.055) / 1.055) ** 2.4, c / 12.92)


# One 256-entry table per channel; entry = luminance coefficient times the
# linearized channel value, so Y(color) = LUT_R[r] + LUT_G[g] + LUT_B[b].
_CHANNEL_VALUES = np.arange(L, dtype=np.float64)
LUT_Y_RED = _Y_RED * _srgb_linearize(_CHANNEL_VALUES)
LUT_Y_GREEN = _Y_GREEN * _srgb_linearize(_CHANNEL_VALUES)
LUT_Y_BLUE = _Y_BLUE * _srgb_linearize(_CHANNEL_VALUES)


@dataclass(frozen=True)
class LinearOperator:
    """Weight triple of a linear color-to-gray projection.

    Each weight must lie strictly inside (0, 1) and the three must sum to 1
    within WEIGHT_SUM_TOL.
    """

    lambda_r: float
    lambda_g: float
    lambda_b: float

    def __post_init__(self) -> None:
        for name, w in (("lambda_r", self.lambda_r),
                        ("lambda_g", self.lambda_g),
                        ("lambda_b", self.lambda_b)):
            if not (0.0 < w < 1.0):
                raise ValueError(f"{name}={w!r} must be strictly inside (0, 1)")
        total = self.lambda_r + self.lambda_g + self.lambda_b
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(
                f"weights sum to {total!r}, deviation exceeds {WEIGHT_SUM_TOL}")

    @property
    def weights(self) -> tuple[float, float, float]:
        return (self.lambda_r, self.lambda_g, self.lambda_b)


UNIFORM = LinearOperator(1 / 3, 1 / 3, 1 / 3)
STANDARD = LinearOperator(0.299, 0.587, 0.114)
# Face-lightening operator; hard-coded so the preset stays stable even if
# solver tolerances shift (see families.member_from_blue(0.5, 0.114)).
CHOSEN = LinearOperator(0.688, 0.198, 0.114)


class LuminanceSample(NamedTuple):
    y_linear: float
    l_star: float


def _check_rgb(color) -> tuple[int, int, int]:
    r, g, b = color
    for v in (r, g, b):
        if not (0 <= v <= 255):
            raise ValueError(f"channel value {v!r} outside [0, 255]")
    return r, g, b


def apply(op: LinearOperator, color) -> int:
    """Project one RGB color to its gray level.

    Evaluation order matches the vectorized paths exactly:
    ((lr*R + lg*G) + lb*B) + eps, then truncation.
    """
    r, g, b = _check_rgb(color)
    return int(op.lambda_r * r + op.lambda_g * g + op.lambda_b * b
               + TRUNCATION_EPS)


def gray_brightness(level: int) -> float:
    """Brightness percentage assigned to a gray level: 100 * level / 255."""
    if not (0 <= level <= 255):
        raise ValueError(f"gray level {level!r} outside [0, 255]")
    return 100.0 * level / 255.0


def lstar_from_y(y: np.ndarray | float):
    """CIE L* from relative luminance, elementwise over arrays."""
    y = np.asarray(y, dtype=np.float64)
    out = np.where(y > LSTAR_Y_THRESHOLD,
                   116.0 * np.cbrt(y) - 16.0,
                   LSTAR_LOW_SLOPE * y)
    return out if out.ndim else float(out)


def cie_lstar(color) -> LuminanceSample:
    """Relative luminance Y and CIE L* of one sRGB color."""
    r, g, b = _check_rgb(color)
    y = LUT_Y_RED[r] + LUT_Y_GREEN[g] + LUT_Y_BLUE[b]
    return LuminanceSample(float(y), lstar_from_y(y))


def apply_image(op: LinearOperator, image: np.ndarray) -> np.ndarray:
    """Project an H x V x 3 color image to an H x V uint8 grayscale image.

    Per pixel this is 3 products and 2 additions plus the epsilon/truncate
    step; there is no per-pixel branching. The channel products and
    left-to-right additions are kept explicit so results are bit-identical
    to apply() on every pixel.
    """
    image = np.asarray(image)
    if image.ndim != 3 or image.shape[-1] != 3:
        raise ValueError(f"expected an H x V x 3 image, got shape {image.shape}")
    if image.size == 0:
        raise EmptyImageError("input image has no pixels")
    chans = image.astype(np.float64)
    gray = (op.lambda_r * chans[..., 0] + op.lambda_g * chans[..., 1]
            + op.lambda_b * chans[..., 2]) + TRUNCATION_EPS
    return gray.astype(np.uint8)
