#!/usr/bin/env python3
"""Dump the limiting phase diagram on a grid of (beta, Gamma) points."""

import argparse
import sys

import numpy as np

from qrem.cli import RunConfig, run


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--beta-max", type=float, default=3.0)
    ap.add_argument("--gamma-max", type=float, default=2.5)
    ap.add_argument("--points", type=int, default=13)
    ap.add_argument("--out", default="phase.csv")
    args = ap.parse_args()

    betas = np.linspace(0.05, args.beta_max, args.points)
    gammas = np.linspace(0.0, args.gamma_max, args.points)
    config = RunConfig(
        command="phase",
        params={"betas": betas.tolist(), "gammas": gammas.tolist()},
        format="csv",
        out=args.out,
    )
    print(run(config))
    return 0


if __name__ == "__main__":
    sys.exit(main())
