#!/usr/bin/env python3
"""Measure the order-one pressure correction against its predicted limit."""

import argparse
import sys

from qrem.cli import parse_int_range
from qrem.thermo import correction_measurement


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--beta", type=float, default=1.0)
    ap.add_argument("--gamma", type=float, default=2.0)
    ap.add_argument("--n", default="8..11", help="inclusive size range a..b")
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--dtype", choices=("float32", "float64"), default=None)
    args = ap.parse_args()

    series = correction_measurement(
        args.beta, args.gamma, parse_int_range(args.n), range(args.seeds),
        dtype=args.dtype,
    )
    print(f"# regime: {series.regime}   prediction: {series.prediction:.6f}")
    print("n,mean,stderr,gap_to_prediction")
    for i, n in enumerate(series.n_list):
        print(f"{n},{series.means[i]:.6f},{series.stderrs[i]:.6f},"
              f"{series.means[i] - series.prediction:+.6f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
