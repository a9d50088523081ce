"""Reference rendering of one square contour with its ID label.

Draws the expected pixels directly: the 11x11 perimeter ring of the square
(10,10)-(20,20) and the 5x7 glyphs of "ID:0" placed at the rounded centroid
plus the default label offset (4,-12).
"""
from pathlib import Path

from PIL import Image

SIZE = 32
BACKGROUND = (20, 20, 20)
COLOR = (230, 25, 75)  # first palette entry

GLYPHS = {
    "I": ["01110", "00100", "00100", "00100", "00100", "00100", "01110"],
    "D": ["11100", "10010", "10001", "10001", "10001", "10010", "11100"],
    ":": ["00000", "01100", "01100", "00000", "01100", "01100", "00000"],
    "0": ["01110", "10001", "10011", "10101", "11001", "10001", "01110"],
}


def main() -> None:
    img = Image.new("RGB", (SIZE, SIZE), BACKGROUND)
    px = img.load()
    ring = 0
    for y in range(10, 21):
        for x in range(10, 21):
            if x in (10, 20) or y in (10, 20):
                px[x, y] = COLOR
                ring += 1
    assert ring == 40

    left, top = 15 + 4, 15 - 12
    for i, ch in enumerate("ID:0"):
        for row, bits in enumerate(GLYPHS[ch]):
            for col, bit in enumerate(bits):
                x, y = left + 6 * i + col, top + row
                if bit == "1" and 0 <= x < SIZE and 0 <= y < SIZE:
                    px[x, y] = COLOR

    img.save(Path(__file__).with_name("square_golden.png"))


if __name__ == "__main__":
    main()
