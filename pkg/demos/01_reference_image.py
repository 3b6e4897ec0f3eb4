"""The reference image: one pixel for each of the 16,777,216 RGB colors.

The image is more of a concept than an allocation: any position decodes to
its color in closed form, so nothing needs to be materialized until a
render is requested. This script decodes a few positions, checks the
round trip, and writes the 2D layout (4096 x 4096) plus a small crop.
"""

from pathlib import Path

from graymode import COLOR_COUNT, color_at_1d, color_index, coord_2d, render_reference
from graymode.imagefiles import write_image

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

print(f"colors in the cube: {COLOR_COUNT:,}")
for index in (0, 1, 256, 65536, COLOR_COUNT - 1):
    color = color_at_1d(index)
    row, col = coord_2d(color)
    assert color_index(color) == index
    print(f"  1D index {index:>10,} -> color {color} -> 2D cell ({row}, {col})")

print("\nrendering the 2D layout...")
buf = render_reference("2d")
print(f"  buffer: {buf.shape}, {buf.nbytes / 2**20:.0f} MiB")

write_image(OUT / "reference_2d.png", buf)
print(f"  wrote {OUT / 'reference_2d.png'}")

# the first box of the grid holds every (0, g, b) color: green grows to the
# right, blue downward
write_image(OUT / "reference_2d_box0.png", buf[:256, :256])
print(f"  wrote {OUT / 'reference_2d_box0.png'} (red = 0 slice)")
