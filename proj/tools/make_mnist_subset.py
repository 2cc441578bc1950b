#!/usr/bin/env python3
"""Build a balanced MNIST subset in IDX format from the npm `mnist` package.

The package ships ~1000 digits per class as JSON arrays of pixel intensities
in [0, 1] on a 1/255 grid. The first 500 digits of each class go to the
training split, the next 200 to the test split; each split is shuffled with a
fixed seed and written as the four standard IDX files, bundled into one
tar.gz that the CMake build extracts.

usage: make_mnist_subset.py <path/to/npm/package> <out.tar.gz>
"""
import io
import json
import random
import struct
import sys
import tarfile
from pathlib import Path

TRAIN_PER_CLASS = 500
TEST_PER_CLASS = 200
SIDE = 28


def load_digits(package_dir: Path):
    digits = []
    for label in range(10):
        raw = json.loads((package_dir / "src" / "digits" / f"{label}.json").read_text())["data"]
        count = len(raw) // (SIDE * SIDE)
        images = []
        for k in range(count):
            chunk = raw[k * SIDE * SIDE:(k + 1) * SIDE * SIDE]
            images.append(bytes(int(round(v * 255)) for v in chunk))
        digits.append(images)
    return digits


def idx_images(images):
    header = struct.pack(">IIII", 0x00000803, len(images), SIDE, SIDE)
    return header + b"".join(images)


def idx_labels(labels):
    return struct.pack(">II", 0x00000801, len(labels)) + bytes(labels)


def main():
    package_dir, out = Path(sys.argv[1]), Path(sys.argv[2])
    digits = load_digits(package_dir)
    train, test = [], []
    for label, images in enumerate(digits):
        assert len(images) >= TRAIN_PER_CLASS + TEST_PER_CLASS
        train += [(img, label) for img in images[:TRAIN_PER_CLASS]]
        test += [(img, label) for img in images[TRAIN_PER_CLASS:TRAIN_PER_CLASS + TEST_PER_CLASS]]
    rng = random.Random(7919)
    rng.shuffle(train)
    rng.shuffle(test)

    files = {
        "train-images-idx3-ubyte": idx_images([img for img, _ in train]),
        "train-labels-idx1-ubyte": idx_labels([lab for _, lab in train]),
        "t10k-images-idx3-ubyte": idx_images([img for img, _ in test]),
        "t10k-labels-idx1-ubyte": idx_labels([lab for _, lab in test]),
    }
    with tarfile.open(out, "w:gz") as tar:
        for name, payload in files.items():
            info = tarfile.TarInfo(f"mnist-subset/{name}")
            info.size = len(payload)
            info.mtime = 0
            tar.addfile(info, io.BytesIO(payload))


if __name__ == "__main__":
    main()
