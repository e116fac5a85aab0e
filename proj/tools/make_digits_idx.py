#!/usr/bin/env python3
"""Build the bundled handwritten-digits corpus in IDX (MNIST layout) format.

Source: scikit-learn's bundled 8x8 digits scans (1797 samples, 10 classes),
upscaled to 28x28 and augmented with one-pixel shifts. Regenerate with:

    python3 tools/make_digits_idx.py data/
"""

import struct
import sys
from pathlib import Path

import numpy as np
from sklearn.datasets import load_digits

SEED = 20240801
TRAIN = 4000
TEST = 1500


def upscale(img8):
    # 8x8 -> 24x24 nearest, then 2px border to 28x28
    big = np.repeat(np.repeat(img8, 3, axis=0), 3, axis=1)
    out = np.zeros((28, 28), dtype=np.uint8)
    out[2:26, 2:26] = np.clip(big * (255.0 / 16.0), 0, 255).astype(np.uint8)
    return out


def shift(img, dr, dc):
    out = np.zeros_like(img)
    rs, cs = slice(max(0, dr), 28 + min(0, dr)), slice(max(0, dc), 28 + min(0, dc))
    rd, cd = slice(max(0, -dr), 28 + min(0, -dr)), slice(max(0, -dc), 28 + min(0, -dc))
    out[rs, cs] = img[rd, cd]
    return out


def write_images(path, imgs):
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", 0x803, len(imgs), 28, 28))
        for im in imgs:
            f.write(im.tobytes())


def write_labels(path, labels):
    with open(path, "wb") as f:
        f.write(struct.pack(">II", 0x801, len(labels)))
        f.write(bytes(int(l) for l in labels))


def main(outdir):
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    d = load_digits()
    rng = np.random.default_rng(SEED)

    imgs, labels = [], []
    for img8, label in zip(d.images, d.target):
        base = upscale(img8)
        for dr, dc in ((0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)):
            imgs.append(shift(base, dr, dc))
            labels.append(label)

    order = rng.permutation(len(imgs))
    imgs = [imgs[i] for i in order]
    labels = [labels[i] for i in order]

    write_images(outdir / "digits-train-images.idx3-ubyte", imgs[:TRAIN])
    write_labels(outdir / "digits-train-labels.idx1-ubyte", labels[:TRAIN])
    write_images(outdir / "digits-test-images.idx3-ubyte", imgs[TRAIN:TRAIN + TEST])
    write_labels(outdir / "digits-test-labels.idx1-ubyte", labels[TRAIN:TRAIN + TEST])
    print(f"wrote {TRAIN} train / {min(TEST, len(imgs) - TRAIN)} test samples to {outdir}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data")
