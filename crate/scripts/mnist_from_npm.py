#!/usr/bin/env python3
"""Convert the digit images bundled in the `mnist` npm package into IDX files.

The npm package (https://github.com/cazala/mnist) ships ~10k real MNIST
digits grouped by class as greyscale/255 rounded to three decimals, which
round-trips exactly back to the original bytes. The images are pooled,
shuffled with a fixed seed, and split into a train and a test pool.

usage: mnist_from_npm.py <npm-package-dir> <out-dir> [--train N] [--test M]

    npm pack mnist && tar xzf mnist-1.1.0.tgz
    python3 scripts/mnist_from_npm.py package data/mnist-desk --train 1000 --test 200
"""

import argparse
import json
import random
import struct
from pathlib import Path

SEED = 20240531


def load_digits(pkg: Path):
    items = []
    for digit in range(10):
        data = json.loads((pkg / "src" / "digits" / f"{digit}.json").read_text())["data"]
        assert len(data) % 784 == 0
        for k in range(len(data) // 784):
            px = bytes(int(round(v * 255)) for v in data[k * 784 : (k + 1) * 784])
            items.append((px, digit))
    return items


def write_idx(out: Path, prefix: str, items):
    with open(out / f"{prefix}-images-idx3-ubyte", "wb") as f:
        f.write(struct.pack(">IIII", 0x803, len(items), 28, 28))
        for px, _ in items:
            f.write(px)
    with open(out / f"{prefix}-labels-idx1-ubyte", "wb") as f:
        f.write(struct.pack(">II", 0x801, len(items)))
        f.write(bytes(label for _, label in items))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("pkg", type=Path)
    ap.add_argument("out", type=Path)
    ap.add_argument("--train", type=int, default=None)
    ap.add_argument("--test", type=int, default=None)
    args = ap.parse_args()

    items = load_digits(args.pkg)
    random.Random(SEED).shuffle(items)
    n_train_pool = len(items) * 4 // 5
    train, test = items[:n_train_pool], items[n_train_pool:]
    if args.train is not None:
        train = train[: args.train]
    if args.test is not None:
        test = test[: args.test]

    args.out.mkdir(parents=True, exist_ok=True)
    write_idx(args.out, "train", train)
    write_idx(args.out, "t10k", test)
    print(f"pool={len(items)} train={len(train)} test={len(test)} -> {args.out}")


if __name__ == "__main__":
    main()
