"""The synthetic reference image: one pixel per RGB color, in 1D and 2D layouts.

The reference image is a concept rather than an allocation: every consumer
works from the closed-form index decode or the per-red-slice iterators, and
the pixel buffers are materialized only on explicit request.

Ordering follows the canonical generation loops: red outermost, then green,
blue innermost, so the 1D list starts at (0,0,0) and ends at (255,255,255).
The 2D layout slices the cube along red into 256 boxes of 256x256 pixels
arranged in a 16x16 matrix of boxes; inside a box green grows rightward and
blue downward.
"""

from __future__ import annotations

from typing import Iterable, Iterator

import numpy as np

L = 256
COLOR_COUNT = L ** 3

# Boxes per row in the 2D layout; fixed, not a parameter, so rendered images
# are reproducible.
GRID_H = 16
GRID_V = L // GRID_H
GRID_SIDE = L * GRID_H  # 4096


def color_at_1d(index: int) -> tuple[int, int, int]:
    """Decode a 1D reference-image position to its color, closed form."""
    if not (0 <= index < COLOR_COUNT):
        raise IndexError(f"color index {index!r} outside [0, {COLOR_COUNT})")
    return (index >> 16) & 0xFF, (index >> 8) & 0xFF, index & 0xFF


def color_index(color) -> int:
    """Inverse of color_at_1d: index = r*256^2 + g*256 + b."""
    r, g, b = color
    return (r << 16) | (g << 8) | b


def iterate_colors(red: int | None = None) -> Iterator[tuple[int, tuple[int, int, int]]]:
    """Yield (index, color) for every color, in 1D reference order.

    With red given, yields only that 65,536-color slice; concatenating the
    slices for red = 0..255 reproduces the full sequence, which is what lets
    parallel consumers split the cube with no shared state.
    """
    reds = range(L) if red is None else (red,)
    for r in reds:
        base = r << 16
        for g in range(L):
            mid = base | (g << 8)
            for b in range(L):
                yield mid | b, (r, g, b)


def slice_plane(red: int) -> tuple[np.ndarray, np.ndarray]:
    """Green/blue meshgrids of one red slice (each 256x256, green varies
    along axis 0 and blue along axis 1, matching iteration order)."""
    g = np.arange(L, dtype=np.int64)
    b = np.arange(L, dtype=np.int64)
    gg, bb = np.meshgrid(g, b, indexing="ij")
    return gg, bb


def coord_2d(color) -> tuple[int, int]:
    """Placement (row, col) of a color in the 4096x4096 2D reference image."""
    r, g, b = color
    v, h = divmod(r, GRID_H)
    return v * L + b, h * L + g


def render_reference(layout: str, replicate: int = 1) -> np.ndarray:
    """Materialize the reference image as a uint8 RGB buffer.

    layout "1d" gives a 1 x 16,777,216 row (replicate stacks copies of the
    row so the bar is visible); layout "2d" gives the 4096x4096 image.
    """
    layout = layout.lower()
    if layout == "1d":
        if replicate < 1:
            raise ValueError("replicate must be >= 1")
        idx = np.arange(COLOR_COUNT, dtype=np.uint32)
        row = np.empty((COLOR_COUNT, 3), dtype=np.uint8)
        row[:, 0] = idx >> 16
        row[:, 1] = (idx >> 8) & 0xFF
        row[:, 2] = idx & 0xFF
        return np.broadcast_to(row, (replicate, COLOR_COUNT, 3)).copy()
    if layout == "2d":
        buf = np.empty((GRID_SIDE, GRID_SIDE, 3), dtype=np.uint8)
        chan = np.arange(L, dtype=np.uint8)
        for r in range(L):
            v, h = divmod(r, GRID_H)
            box = buf[v * L:(v + 1) * L, h * L:(h + 1) * L]
            box[:, :, 0] = r
            box[:, :, 1] = chan[np.newaxis, :]   # green rightward
            box[:, :, 2] = chan[:, np.newaxis]   # blue downward
        return buf
    raise ValueError(f"unknown layout {layout!r}, expected '1d' or '2d'")


def split_reds(partitions: int) -> list[range]:
    """Partition the red axis into contiguous, disjoint, order-covering
    chunks for parallel accumulation."""
    if not (1 <= partitions <= L):
        raise ValueError(f"partitions must be in [1, {L}]")
    bounds = np.linspace(0, L, partitions + 1, dtype=int)
    return [range(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:])
            if b > a]
