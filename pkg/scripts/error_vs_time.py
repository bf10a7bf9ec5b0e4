"""Simulate a heat model and its time-limited reduction, writing the
error trajectory against the bound level.

The error series is valid against the bound only on [0, tbar]; the
simulation runs to 4*tbar by default so the CSV shows the bound's
region of validity ending mid-plot.
"""
import argparse
import sys

from tlbt.cli import main as tlbt_main


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=50, help="heat-model state dimension")
    ap.add_argument("--m", type=int, default=7, help="number of inputs")
    ap.add_argument("--p", type=int, default=6, help="number of outputs")
    ap.add_argument("--tbar", type=float, default=0.05, help="bound horizon")
    ap.add_argument("--order", type=int, default=6, help="reduced order")
    ap.add_argument("--input", default="star", help="input spec (see tlbt --help)")
    ap.add_argument("--out", default="results/error_vs_time", help="output directory")
    args = ap.parse_args(argv)
    return tlbt_main([
        "simulate",
        "--model", f"gen:{args.n},{args.m},{args.p}",
        "--tbar", str(args.tbar),
        "--tend", str(4 * args.tbar),
        "--order", str(args.order),
        "--input", args.input,
        "--out", args.out,
    ])


if __name__ == "__main__":
    sys.exit(main())
