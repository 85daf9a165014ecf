#!/usr/bin/env python3
"""Regenerate tests/fixtures/natural/*.ppm from scikit-image's bundled images.

Each fixture is a 128x128 crop box-averaged down to 64x64 RGB, written as
binary P6. Output is deterministic.
"""
import pathlib
import sys

import numpy as np
import skimage.data as data

CROPS = [
    ("astronaut_face", "astronaut", 40, 160),
    ("astronaut_flag", "astronaut", 300, 330),
    ("chelsea_eye", "chelsea", 60, 120),
    ("coffee_cup", "coffee", 150, 200),
    ("coffee_beans", "coffee", 20, 420),
    ("rocket_tower", "rocket", 200, 280),
    ("ihc_tissue", "immunohistochemistry", 200, 200),
    ("hubble_field", "hubble_deep_field", 400, 400),
    ("retina_vessels", "retina", 500, 300),
    ("cat_fur", "cat", 150, 250),
    ("colorwheel_edge", "colorwheel", 120, 40),
    ("astronaut_suit", "astronaut", 380, 100),
    ("chelsea_whiskers", "chelsea", 150, 200),
    ("coffee_saucer", "coffee", 250, 300),
    ("rocket_sky", "rocket", 20, 20),
    ("cat_face", "cat", 60, 120),
]


def main(out_dir: pathlib.Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, source, top, left in CROPS:
        img = getattr(data, source)()[..., :3].astype(np.float64)
        crop = img[top:top + 128, left:left + 128]
        small = crop.reshape(64, 2, 64, 2, 3).mean(axis=(1, 3))
        pixels = np.clip(np.floor(small + 0.5), 0, 255).astype(np.uint8)
        with open(out_dir / f"{name}.ppm", "wb") as f:
            f.write(b"P6\n64 64\n255\n")
            f.write(pixels.tobytes())


if __name__ == "__main__":
    root = pathlib.Path(__file__).resolve().parent.parent
    main(pathlib.Path(sys.argv[1]) if len(sys.argv) > 1
         else root / "tests" / "fixtures" / "natural")
