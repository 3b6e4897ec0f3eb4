import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graymode.color import (
    CHOSEN,
    STANDARD,
    UNIFORM,
    EmptyImageError,
    LinearOperator,
    apply,
    apply_image,
    cie_lstar,
    gray_brightness,
)
from .conftest import make_random_operator


def reference_lstar(r: int, g: int, b: int) -> float:
    """Independent scalar sRGB -> L* oracle (no lookup tables)."""
    def linearize(c):
        c = c / 255.0
        if c > 0.04045:
            return ((c + 0.055) / 1.055) ** 2.4
        return c / 12.92

    y = 0.2126 * linearize(r) + 0.7152 * linearize(g) + 0.0722 * linearize(b)
    if y > 0.008856:
        return 116.0 * y ** (1.0 / 3.0) - 16.0
    return 903.292 * y


channel = st.integers(min_value=0, max_value=255)


@st.composite
def operators(draw):
    a = draw(st.floats(min_value=0.02, max_value=0.94))
    b = draw(st.floats(min_value=0.02, max_value=0.96 - a))
    c = 1.0 - a - b
    s = a + b + c
    return LinearOperator(a / s, b / s, c / s)


class TestLinearOperator:
    def test_rejects_sum_violation(self):
        with pytest.raises(ValueError):
            LinearOperator(0.5, 0.5, 0.1)

    def test_rejects_boundary_weights(self):
        with pytest.raises(ValueError):
            LinearOperator(0.0, 0.5, 0.5)
        with pytest.raises(ValueError):
            LinearOperator(1.0, 0.0, 0.0)

    def test_no_silent_renormalization(self):
        # 1e-6 off is far outside tolerance; must raise, not rescale
        with pytest.raises(ValueError):
            LinearOperator(0.3, 0.3, 0.400001)

    def test_presets_valid(self):
        for op in (UNIFORM, STANDARD, CHOSEN):
            assert math.isclose(sum(op.weights), 1.0, abs_tol=1e-9)


class TestApply:
    def test_uniform_example(self):
        assert apply(UNIFORM, (1, 2, 3)) == 2

    def test_standard_red(self):
        # 0.299 * 255 = 76.245
        assert apply(STANDARD, (255, 0, 0)) == 76

    def test_white_maps_to_255(self):
        for op in (UNIFORM, STANDARD, CHOSEN):
            assert apply(op, (255, 255, 255)) == 255

    def test_rejects_out_of_range_channel(self):
        with pytest.raises(ValueError):
            apply(UNIFORM, (-1, 0, 0))
        with pytest.raises(ValueError):
            apply(UNIFORM, (0, 256, 0))

    def test_gray_diagonal_identity(self):
        rng = random.Random(1)
        ops = [UNIFORM, STANDARD, CHOSEN] + [make_random_operator(rng)
                                             for _ in range(10)]
        for op in ops:
            for v in range(256):
                assert apply(op, (v, v, v)) == v

    @given(operators(), channel, channel, channel,
           st.integers(0, 255), st.integers(0, 255), st.integers(0, 255))
    @settings(max_examples=100)
    def test_monotonicity(self, op, r, g, b, dr, dg, db):
        r2 = min(255, r + dr)
        g2 = min(255, g + dg)
        b2 = min(255, b + db)
        assert apply(op, (r2, g2, b2)) >= apply(op, (r, g, b))

    @given(operators(), channel, channel, channel)
    @settings(max_examples=100)
    def test_brightness_of_result_in_range(self, op, r, g, b):
        level = apply(op, (r, g, b))
        assert 0 <= level <= 255
        assert 0.0 <= gray_brightness(level) <= 100.0


class TestGrayBrightness:
    def test_examples(self):
        assert gray_brightness(0) == 0.0
        assert gray_brightness(255) == 100.0
        assert gray_brightness(51) == pytest.approx(20.0)

    def test_range_check(self):
        with pytest.raises(ValueError):
            gray_brightness(256)


class TestCieLstar:
    def test_black(self):
        sample = cie_lstar((0, 0, 0))
        assert sample.y_linear == 0.0
        assert sample.l_star == 0.0

    def test_white(self):
        sample = cie_lstar((255, 255, 255))
        assert sample.y_linear == pytest.approx(1.0, abs=1e-12)
        assert sample.l_star == pytest.approx(100.0, abs=1e-9)

    def test_mid_gray(self):
        assert cie_lstar((119, 119, 119)).l_star == pytest.approx(50.0, abs=0.1)

    def test_strictly_increasing_on_gray_diagonal(self):
        values = [cie_lstar((v, v, v)).l_star for v in range(256)]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_agrees_with_reference_oracle(self):
        rng = random.Random(123)
        worst = 0.0
        for _ in range(10_000):
            r, g, b = (rng.randrange(256) for _ in range(3))
            got = cie_lstar((r, g, b)).l_star
            worst = max(worst, abs(got - reference_lstar(r, g, b)))
        assert worst <= 1e-6

    def test_low_branch_constant(self):
        # (7,7,7) lands well below the Y threshold
        sample = cie_lstar((7, 7, 7))
        assert sample.y_linear < 0.008856
        assert sample.l_star == pytest.approx(903.292 * sample.y_linear)


class TestApplyImage:
    def test_single_white_pixel(self):
        img = np.full((1, 1, 3), 255, dtype=np.uint8)
        assert apply_image(UNIFORM, img).tolist() == [[255]]

    def test_two_pixel_row(self):
        img = np.array([[(0, 0, 0), (255, 0, 0)]], dtype=np.uint8)
        assert apply_image(STANDARD, img).tolist() == [[0, 76]]

    def test_shape_preserved(self, tiny_image):
        out = apply_image(STANDARD, tiny_image)
        assert out.shape == tiny_image.shape[:2]
        assert out.dtype == np.uint8

    def test_matches_scalar_apply(self, tiny_image):
        out = apply_image(CHOSEN, tiny_image)
        for (i, j), level in np.ndenumerate(out):
            assert level == apply(CHOSEN, tuple(int(c) for c in tiny_image[i, j]))

    def test_empty_image_rejected(self):
        with pytest.raises(EmptyImageError):
            apply_image(UNIFORM, np.zeros((0, 4, 3), dtype=np.uint8))

    def test_wrong_shape_rejected(self):
        with pytest.raises(ValueError):
            apply_image(UNIFORM, np.zeros((4, 4), dtype=np.uint8))
