"""Shape classification of EQ and BM modes.

EQ curves fall into three shapes: a wide near-maximal plateau makes a
trapezoid; narrow-topped curves are triangles when both flanks are straight
lines and bells otherwise. Trapezoids and triangles additionally get a
rounded/sharp corner variant from the curvature concentrated at the
plateau (or apex) boundaries. BM curves fall into two kinds: regular stays
at or above the isobrightness line almost everywhere, irregular dips below
it over the upper end of the grayscale.

The class definitions are visual, so every decision threshold lives in
ClassifierConfig where it can be recalibrated without touching code. The
defaults were calibrated against exact full-cube modes of the reference
operators (see the classifier regression tests).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .color import LinearOperator
from .modes import BmMode, EqMode, bm_deviation, compute_modes

L = 256


class UnclassifiableError(ValueError):
    """The mode data is too degenerate to carry a shape class."""


@dataclass(frozen=True)
class ClassifierConfig:
    # EQ shape
    plateau_level: float = 0.95       # normalized count that still counts as top
    trapezoid_min_width: float = 0.15  # plateau width, fraction of the 256 levels
    flank_band_lo: float = 0.10       # flank = levels with normalized count
    flank_band_hi: float = 0.90       #   inside this band, outside the plateau
    flank_r2_min: float = 0.999       # straight-flank threshold for triangular
    # EQ corner variant
    corner_window: int = 5            # levels inspected around each boundary
    corner_ratio: float = 12.0        # boundary curvature vs median flank curvature
    # BM kind
    bm_top_start: int = 154           # first level of the final 40% of grayscale
    bm_overluminance_cut: float = -1.0  # mean deviation (percent) below => irregular
    bm_min_present: float = 0.90      # required fraction of non-empty channels


DEFAULT_CONFIG = ClassifierConfig()


@dataclass(frozen=True)
class EqClass:
    shape: str                 # "bell" | "trapezoidal" | "triangular"
    corner: str | None = None  # "rounded" | "sharp"; None for bell

    def __post_init__(self) -> None:
        if self.shape not in ("bell", "trapezoidal", "triangular"):
            raise ValueError(f"unknown EQ shape {self.shape!r}")
        if self.shape == "bell":
            if self.corner is not None:
                raise ValueError("bell carries no corner variant")
        elif self.corner not in ("rounded", "sharp"):
            raise ValueError(f"unknown corner variant {self.corner!r}")

    @property
    def label(self) -> str:
        return self.shape if self.corner is None else f"{self.shape}-{self.corner}"


@dataclass(frozen=True)
class BmClass:
    kind: str  # "regular" | "irregular"

    def __post_init__(self) -> None:
        if self.kind not in ("regular", "irregular"):
            raise ValueError(f"unknown BM kind {self.kind!r}")


@dataclass(frozen=True)
class TaxonomyLabel:
    eq: EqClass
    bm: BmClass

    @property
    def label(self) -> str:
        return f"{self.eq.label}/{self.bm.kind}"


def _plateau(nc: np.ndarray, level: float) -> tuple[int, int]:
    """Contiguous run of levels >= level containing the peak."""
    peak = int(np.argmax(nc))
    lo = peak
    while lo > 0 and nc[lo - 1] >= level:
        lo -= 1
    hi = peak
    while hi < L - 1 and nc[hi + 1] >= level:
        hi += 1
    return lo, hi


def _line_r2(indices: list[int], nc: np.ndarray) -> float | None:
    if len(indices) < 3:
        return None
    x = np.asarray(indices, dtype=np.float64)
    y = nc[indices]
    slope, intercept = np.polyfit(x, y, 1)
    residual = y - (slope * x + intercept)
    total = float(((y - y.mean()) ** 2).sum())
    if total == 0.0:
        return 0.0
    return 1.0 - float((residual ** 2).sum()) / total


def classify_eq(eq: EqMode, config: ClassifierConfig = DEFAULT_CONFIG) -> EqClass:
    """Assign the EQ shape class (and corner variant where applicable)."""
    counts = eq.counts.astype(np.float64)
    if np.count_nonzero(counts) < 3:
        raise UnclassifiableError("EQ mode concentrates all mass in < 3 levels")
    nc = counts / counts.max()

    lo, hi = _plateau(nc, config.plateau_level)
    width = (hi - lo + 1) / L
    left = [j for j in range(lo)
            if config.flank_band_lo <= nc[j] <= config.flank_band_hi]
    right = [j for j in range(hi + 1, L)
             if config.flank_band_lo <= nc[j] <= config.flank_band_hi]

    if width >= config.trapezoid_min_width:
        shape = "trapezoidal"
    else:
        r2_left = _line_r2(left, nc)
        r2_right = _line_r2(right, nc)
        if (r2_left is not None and r2_right is not None
                and r2_left >= config.flank_r2_min
                and r2_right >= config.flank_r2_min):
            shape = "triangular"
        else:
            shape = "bell"

    if shape == "bell":
        return EqClass("bell")

    second = np.zeros(L)
    second[1:L - 1] = nc[2:] - 2.0 * nc[1:L - 1] + nc[:L - 2]
    flank_idx = left + right
    median_curv = float(np.median(np.abs(second[flank_idx]))) if flank_idx else 0.0
    win = config.corner_window
    boundary_curv = 0.0
    for boundary in (lo, hi):
        sel = slice(max(1, boundary - win), min(L - 1, boundary + win + 1))
        boundary_curv = max(boundary_curv, float(np.abs(second[sel]).max()))
    if median_curv == 0.0:
        sharp = boundary_curv > 0.0
    else:
        sharp = boundary_curv > config.corner_ratio * median_curv
    return EqClass(shape, "sharp" if sharp else "rounded")


def classify_bm(bm: BmMode, config: ClassifierConfig = DEFAULT_CONFIG) -> BmClass:
    """Assign the BM kind from the curve's deviation over the upper levels."""
    present = bm.present
    if present.mean() < config.bm_min_present:
        raise UnclassifiableError(
            f"only {int(present.sum())} of {L} channels carry data")
    deviation = bm_deviation(bm)
    top = deviation[config.bm_top_start:]
    top_mean = float(np.nanmean(top))
    kind = "irregular" if top_mean < config.bm_overluminance_cut else "regular"
    return BmClass(kind)


def classify_modes(eq: EqMode, bm: BmMode,
                   config: ClassifierConfig = DEFAULT_CONFIG) -> TaxonomyLabel:
    """Taxonomy label from already-computed modes."""
    return TaxonomyLabel(classify_eq(eq, config), classify_bm(bm, config))


def taxonomy(op: LinearOperator, config: ClassifierConfig = DEFAULT_CONFIG,
             workers: int = 1) -> TaxonomyLabel:
    """Full-cube modes of the operator, then the combined taxonomy label."""
    eq, bm = compute_modes(op, workers=workers)
    return classify_modes(eq, bm, config)
