"""Write a two-class 8x8 digits split as binary CSV files.

Needs scikit-learn. Intensities 0..16 are rescaled to 0..255 and binarised
with a strict threshold, one bit per pixel in row-major order, label last.

    python3 scripts/make_digits_csv.py --pos 8 --neg 3 --out-dir data/
"""

import argparse
import os

import numpy as np
from sklearn.datasets import load_digits

from tsmverify.data import binarize_grayscale, save_binary_csv
from tsmverify.rng import SplitMix64


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--pos", type=int, default=8, help="digit labelled 1")
    ap.add_argument("--neg", type=int, default=3, help="digit labelled 0")
    ap.add_argument("--threshold", type=int, default=128)
    ap.add_argument("--train", type=int, default=250, help="number of training rows")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out-dir", default=".")
    a = ap.parse_args()

    d = load_digits()
    keep = np.flatnonzero((d.target == a.pos) | (d.target == a.neg))
    keep = keep[SplitMix64(a.seed).permutation(len(keep))]
    rows = [
        binarize_grayscale(d.images[i] * 255 / 16, a.threshold, int(d.target[i] == a.pos))
        for i in keep
    ]
    os.makedirs(a.out_dir, exist_ok=True)
    save_binary_csv(rows[: a.train], os.path.join(a.out_dir, "train.csv"))
    save_binary_csv(rows[a.train:], os.path.join(a.out_dir, "test.csv"))
    print(f"{a.train} train / {len(rows) - a.train} test rows in {a.out_dir}")


if __name__ == "__main__":
    main()
