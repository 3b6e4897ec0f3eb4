import json
import random

import numpy as np
import pytest

from graymode.color import CHOSEN, STANDARD, UNIFORM, LinearOperator
from graymode.modes import compute_modes


def make_random_operator(rng: random.Random, floor: float = 0.02) -> LinearOperator:
    """Random interior weight triple, renormalized so the float sum is 1
    within a few ulp (the epsilon rule absorbs that much)."""
    while True:
        a, b = sorted((rng.random(), rng.random()))
        w = (a, b - a, 1.0 - b)
        if min(w) >= floor:
            s = w[0] + w[1] + w[2]
            return LinearOperator(w[0] / s, w[1] / s, w[2] / s)


@pytest.fixture(scope="session")
def preset_modes():
    """Full-cube EQ/BM modes of the three reference operators, computed once."""
    return {
        "uniform": compute_modes(UNIFORM),
        "standard": compute_modes(STANDARD),
        "chosen": compute_modes(CHOSEN),
    }


@pytest.fixture
def tiny_image():
    """Deterministic 8x6 color image."""
    rng = np.random.default_rng(42)
    return rng.integers(0, 256, size=(6, 8, 3), dtype=np.uint8)


def build_image_set(root, set_id, entries, size=(6, 8)):
    """Create a study image set (variants command output layout per image).

    entries: list of (image_id, cohort).
    """
    from graymode.cli import main as cli_main
    from graymode.imagefiles import write_image

    set_dir = root / set_id
    rng = np.random.default_rng(99)
    for image_id, _ in entries:
        img = rng.integers(0, 256, size=(size[0], size[1], 3), dtype=np.uint8)
        src = root / f"{image_id}-src.png"
        write_image(src, img)
        assert cli_main(["variants", str(src),
                         "--out-dir", str(set_dir / image_id)]) == 0
    (set_dir / "set.json").write_text(json.dumps({
        "images": [{"id": image_id, "cohort": cohort}
                   for image_id, cohort in entries],
    }), encoding="utf-8")
    return set_dir
