"""Reading and writing PNG and binary PPM/PGM image files.

PNG goes through Pillow. PPM (P6, color) and PGM (P5, grayscale) are written
and parsed directly: they are the dependency-free fallback and make handy
bit-exact test fixtures. Grayscale data written to a .ppm path is replicated
across the three channels.
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np
from PIL import Image

Image.MAX_IMAGE_PIXELS = None  # reference renders exceed Pillow's default cap

_PNM_HEADER = re.compile(rb"^(P[56])\s+(?:#.*\s+)*(\d+)\s+(\d+)\s+(\d+)\s")


def _read_pnm(path: Path) -> np.ndarray:
    raw = path.read_bytes()
    m = _PNM_HEADER.match(raw)
    if not m:
        raise ValueError(f"{path}: not a binary PPM/PGM file")
    magic, width, height, maxval = m.group(1), int(m.group(2)), int(m.group(3)), int(m.group(4))
    if maxval != 255:
        raise ValueError(f"{path}: only maxval 255 is supported, got {maxval}")
    channels = 3 if magic == b"P6" else 1
    data = np.frombuffer(raw, dtype=np.uint8, count=width * height * channels,
                         offset=m.end())
    if data.size != width * height * channels:
        raise ValueError(f"{path}: truncated pixel data")
    img = data.reshape(height, width, channels)
    return img if channels == 3 else img[:, :, 0]


def _write_pnm(path: Path, array: np.ndarray) -> None:
    if array.ndim == 3:
        magic = b"P6"
    elif array.ndim == 2:
        magic = b"P5"
    else:
        raise ValueError(f"cannot write array of shape {array.shape}")
    h, w = array.shape[:2]
    header = b"%s\n%d %d\n255\n" % (magic, w, h)
    path.write_bytes(header + np.ascontiguousarray(array, dtype=np.uint8).tobytes())


def read_color_image(path) -> np.ndarray:
    """Load a color image as an H x V x 3 uint8 array."""
    path = Path(path)
    if path.suffix.lower() in (".ppm", ".pgm", ".pnm"):
        img = _read_pnm(path)
        if img.ndim == 2:
            img = np.stack([img] * 3, axis=-1)
        return img
    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"))


def write_image(path, array: np.ndarray) -> None:
    """Write a uint8 array (H x V grayscale or H x V x 3 color) by extension."""
    path = Path(path)
    array = np.ascontiguousarray(array, dtype=np.uint8)
    suffix = path.suffix.lower()
    if suffix in (".ppm", ".pnm"):
        if array.ndim == 2:
            array = np.stack([array] * 3, axis=-1)
        _write_pnm(path, array)
    elif suffix == ".pgm":
        if array.ndim == 3:
            raise ValueError("PGM holds grayscale data only")
        _write_pnm(path, array)
    else:
        mode = "L" if array.ndim == 2 else "RGB"
        Image.fromarray(array, mode=mode).save(path)


def read_gray_image(path) -> np.ndarray:
    """Load a grayscale image as an H x V uint8 array.

    A color file whose three channels agree is accepted (grayscale written
    into a P6/PNG RGB container); mismatched channels are an error.
    """
    path = Path(path)
    if path.suffix.lower() in (".ppm", ".pgm", ".pnm"):
        img = _read_pnm(path)
    else:
        with Image.open(path) as im:
            if im.mode == "L":
                return np.asarray(im)
            img = np.asarray(im.convert("RGB"))
    if img.ndim == 2:
        return img
    if (img[:, :, 0] == img[:, :, 1]).all() and (img[:, :, 0] == img[:, :, 2]).all():
        return img[:, :, 0]
    raise ValueError(f"{path}: color image where grayscale was expected")
