#!/usr/bin/env python3
# Copyright (c) 2026 The strme Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes a small MNIST subset in IDX format.

The source is the 5000-sample MNIST extract shipped inside the mlxtend wheel
(mlxtend/data/data/mnist_5k.csv.gz, 784 pixel columns then the label). The
rows are shuffled with a fixed seed and split into disjoint train/test files.

    pip download --no-deps mlxtend -d /tmp/pkgs
    python3 tools/make_mnist_subset.py /tmp/pkgs/mlxtend-*.whl data/mnist_subset
"""
import argparse
import gzip
import pathlib
import random
import struct
import zipfile

MEMBER = "mlxtend/data/data/mnist_5k.csv.gz"


def load_rows(source):
    if source.suffix == ".whl":
        raw = zipfile.ZipFile(source).read(MEMBER)
    else:
        raw = source.read_bytes()
    rows = []
    for line in gzip.decompress(raw).decode().splitlines():
        fields = line.split(",")
        pixels = bytes(int(float(v)) for v in fields[:784])
        rows.append((pixels, int(fields[784])))
    return rows


def write_images(path, rows):
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", 2051, len(rows), 28, 28))
        for pixels, _ in rows:
            f.write(pixels)


def write_labels(path, rows):
    with open(path, "wb") as f:
        f.write(struct.pack(">II", 2049, len(rows)))
        f.write(bytes(label for _, label in rows))


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("source", type=pathlib.Path)
    parser.add_argument("out_dir", type=pathlib.Path)
    parser.add_argument("--train", type=int, default=1000)
    parser.add_argument("--test", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=20190801)
    args = parser.parse_args()

    rows = load_rows(args.source)
    random.Random(args.seed).shuffle(rows)
    train = rows[: args.train]
    test = rows[args.train : args.train + args.test]

    args.out_dir.mkdir(parents=True, exist_ok=True)
    write_images(args.out_dir / "train-images-idx3-ubyte", train)
    write_labels(args.out_dir / "train-labels-idx1-ubyte", train)
    write_images(args.out_dir / "t10k-images-idx3-ubyte", test)
    write_labels(args.out_dir / "t10k-labels-idx1-ubyte", test)


if __name__ == "__main__":
    main()
