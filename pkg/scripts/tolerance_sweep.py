"""Sweep the singular-value tail tolerance tau, letting each method pick
its own reduced order, and tabulate the resulting errors.

Looser tolerances select smaller orders; the sweep CSV records the
order each method chose alongside its max error on [0, tbar].
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
    ap.add_argument("--taus", default="1e-2,1e-3,1e-4,1e-5,1e-6,1e-7", help="tau values")
    ap.add_argument("--input", default="star", help="input spec")
    ap.add_argument("--jobs", type=int, default=2, help="concurrent sweep workers")
    ap.add_argument("--out", default="results/tau_sweep", help="output directory")
    args = ap.parse_args(argv)
    return tlbt_main([
        "sweep", "--axis", "tau", "--values", args.taus,
        "--model", f"gen:{args.n},{args.m},{args.p}",
        "--tbar", str(args.tbar), "--input", args.input,
        "--jobs", str(args.jobs), "--out", args.out,
    ])


if __name__ == "__main__":
    sys.exit(main())
