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
"""Generates a sparse binary classification set in LIBSVM text format.

Labels come from a random linear separator with Gaussian label noise, so the
regularized logistic loss on the result is well conditioned but not separable.

    python3 tools/gen_synthetic_libsvm.py data/synthetic_200x20.svm -n 200 -d 20
"""
import argparse
import random


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("out")
    parser.add_argument("-n", type=int, required=True)
    parser.add_argument("-d", type=int, required=True)
    parser.add_argument("--density", type=float, default=0.2)
    parser.add_argument("--noise", type=float, default=0.5)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    w = [rng.gauss(0.0, 1.0) for _ in range(args.d)]
    with open(args.out, "w") as f:
        f.write(f"# synthetic logistic data n={args.n} d={args.d} seed={args.seed}\n")
        for _ in range(args.n - 1):
            feats = [j for j in range(args.d) if rng.random() < args.density]
            vals = {j: round(rng.gauss(0.0, 1.0), 6) for j in feats}
            margin = sum(w[j] * v for j, v in vals.items()) + rng.gauss(0.0, args.noise)
            label = "+1" if margin >= 0 else "-1"
            toks = " ".join(f"{j + 1}:{v:g}" for j, v in sorted(vals.items()))
            f.write(f"{label} {toks}".rstrip() + "\n")
        # Trailing row touching the highest feature index keeps d exact.
        f.write(f"-1 {args.d}:0.5\n")


if __name__ == "__main__":
    main()
