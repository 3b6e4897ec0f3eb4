"""Single-pass EQ and BM mode computation over the full RGB cube.

One streaming pass per operator: for every color, the gray level and the
CIE L* luminance are computed slice by slice along the red axis, feeding
three 256-entry accumulators (count, sum of L*, sum of L* squared). The
16.7M gray outputs are never materialized.

Slices are disjoint, so the pass can fan out over red-axis partitions; the
merge is plain addition and partial results are always combined in red
order, which keeps counts bit-identical and sums deterministic for a given
partition count.

The arithmetic inside a slice keeps the scalar evaluation order of
color.apply and color.cie_lstar (products first, additions left to right),
so the streaming pass agrees bit for bit with per-color scalar evaluation.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .color import (
    L,
    LUT_Y_BLUE,
    LUT_Y_GREEN,
    LUT_Y_RED,
    TRUNCATION_EPS,
    LinearOperator,
    lstar_from_y,
)

FULL_CUBE_COLORS = L ** 3

_VALID_TOL = 1e-9


@dataclass(frozen=True)
class EqMode:
    """Colors mapped per gray level: a 256-bin count vector."""

    counts: np.ndarray

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts)
        if counts.shape != (L,) or not np.issubdtype(counts.dtype, np.integer):
            raise ValueError("counts must be a length-256 integer vector")
        if (counts < 0).any():
            raise ValueError("counts must be non-negative")
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class BmMode:
    """Per-gray-level mean and population standard deviation of CIE L*.

    Channels that received no colors have no statistics: mean_lstar and
    std_lstar hold NaN there and `present` is False. Use mean_at/std_at for
    explicit per-level access.
    """

    counts: np.ndarray
    mean_lstar: np.ndarray
    std_lstar: np.ndarray
    present: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts)
        mean = np.asarray(self.mean_lstar, dtype=np.float64)
        std = np.asarray(self.std_lstar, dtype=np.float64)
        for name, arr in (("counts", counts), ("mean_lstar", mean),
                          ("std_lstar", std)):
            if arr.shape != (L,):
                raise ValueError(f"{name} must have shape (256,)")
        present = counts > 0
        if np.isnan(mean[present]).any() or np.isnan(std[present]).any():
            raise ValueError("present channels must carry statistics")
        if not (np.isnan(mean[~present]).all() and np.isnan(std[~present]).all()):
            raise ValueError("absent channels must carry NaN, not numbers")
        if ((mean[present] < -_VALID_TOL).any()
                or (mean[present] > 100.0 + _VALID_TOL).any()):
            raise ValueError("mean L* outside [0, 100]")
        if (std[present] < -_VALID_TOL).any():
            raise ValueError("std L* must be non-negative")
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "mean_lstar", mean)
        object.__setattr__(self, "std_lstar", std)
        object.__setattr__(self, "present", present)

    def mean_at(self, j: int) -> float | None:
        return float(self.mean_lstar[j]) if self.present[j] else None

    def std_at(self, j: int) -> float | None:
        return float(self.std_lstar[j]) if self.present[j] else None


def _check_channel_values(channel_values) -> np.ndarray:
    if channel_values is None:
        return np.arange(L, dtype=np.int64)
    values = np.asarray(channel_values, dtype=np.int64)
    if values.ndim != 1 or values.size == 0:
        raise ValueError("channel_values must be a non-empty 1D integer array")
    if (values < 0).any() or (values > 255).any():
        raise ValueError("channel_values must lie within [0, 255]")
    return values


def _accumulate(op: LinearOperator, reds: np.ndarray, values: np.ndarray,
                with_lstar: bool):
    """Accumulate (counts, sum L*, sum L*^2) over the given red slices."""
    counts = np.zeros(L, dtype=np.int64)
    suml = np.zeros(L, dtype=np.float64) if with_lstar else None
    suml2 = np.zeros(L, dtype=np.float64) if with_lstar else None

    fv = values.astype(np.float64)
    lg_g = op.lambda_g * fv
    lb_b = (op.lambda_b * fv)[np.newaxis, :]
    if with_lstar:
        yg = LUT_Y_GREEN[values]
        yb = LUT_Y_BLUE[values][np.newaxis, :]

    for r in reds:
        rv = int(values[r])
        partial = op.lambda_r * float(rv) + lg_g
        gray = ((partial[:, np.newaxis] + lb_b) + TRUNCATION_EPS).astype(np.int64)
        flat = gray.ravel()
        counts += np.bincount(flat, minlength=L)
        if with_lstar:
            y = (LUT_Y_RED[rv] + yg)[:, np.newaxis] + yb
            lstar = lstar_from_y(y)
            suml += np.bincount(flat, weights=lstar.ravel(), minlength=L)
            suml2 += np.bincount(flat, weights=(lstar * lstar).ravel(),
                                 minlength=L)
    return counts, suml, suml2


def _run_partitioned(op: LinearOperator, values: np.ndarray, workers: int,
                     with_lstar: bool):
    n_red = values.size
    workers = max(1, min(int(workers), n_red))
    bounds = np.linspace(0, n_red, workers + 1, dtype=int)
    chunks = [np.arange(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    if len(chunks) == 1:
        return _accumulate(op, chunks[0], values, with_lstar)
    with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
        futures = [pool.submit(_accumulate, op, chunk, values, with_lstar)
                   for chunk in chunks]
        parts = [f.result() for f in futures]  # merged in red order
    counts = np.zeros(L, dtype=np.int64)
    suml = np.zeros(L, dtype=np.float64) if with_lstar else None
    suml2 = np.zeros(L, dtype=np.float64) if with_lstar else None
    for c, s, s2 in parts:
        counts += c
        if with_lstar:
            suml += s
            suml2 += s2
    return counts, suml, suml2


def compute_eq(op: LinearOperator, channel_values=None,
               workers: int = 1) -> EqMode:
    """EQ mode alone: the counts-only fast path for parameter sweeps."""
    values = _check_channel_values(channel_values)
    counts, _, _ = _run_partitioned(op, values, workers, with_lstar=False)
    return EqMode(counts)


def compute_modes(op: LinearOperator, channel_values=None,
                  workers: int = 1) -> tuple[EqMode, BmMode]:
    """EQ and BM modes of an operator in one streaming pass.

    channel_values defaults to the full 0..255 cube (16,777,216 colors);
    passing a reduced value set runs the identical formulas over that
    smaller cube, which is what the brute-force oracles check against.
    workers > 1 fans the red-axis partitions out to a thread pool; results
    are independent of the partition count.
    """
    values = _check_channel_values(channel_values)
    counts, suml, suml2 = _run_partitioned(op, values, workers, with_lstar=True)
    expected = values.size ** 3
    if counts.sum() != expected:
        raise AssertionError(
            f"accumulated {counts.sum()} colors, expected {expected}")

    with np.errstate(divide="ignore", invalid="ignore"):
        mean = suml / counts
        var = suml2 / counts - mean * mean
    std = np.sqrt(np.clip(var, 0.0, None))
    absent = counts == 0
    mean[absent] = np.nan
    std[absent] = np.nan
    return EqMode(counts), BmMode(counts, mean, std)


def priority(eq: EqMode) -> np.ndarray:
    """Priority spectrum p[j] = EQ(j) / total colors; sums to 1."""
    return eq.counts / eq.total


def bm_deviation(bm: BmMode) -> np.ndarray:
    """Per-level deviation of the BM curve from the isobrightness line:
    d[j] = mean L*(j) - 100*j/255. NaN where the channel is absent."""
    iso = 100.0 * np.arange(L) / 255.0
    return bm.mean_lstar - iso
