"""Spiked matrix phase diagram on a (beta, lambda) grid through the CLI.

Writes a CSV and its manifest; equivalent to
``spinglass --out <file> phase-diagram ...``.
"""

import argparse
import sys

from spinglass.cli import main as cli


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--model", choices=["pspin-k2", "sk"], default="pspin-k2")
    ap.add_argument("--num", type=int, default=50)
    ap.add_argument("--out", default="phase_diagram.csv")
    args = ap.parse_args()
    sys.exit(cli(["--out", args.out, "phase-diagram", "--model", args.model,
                  "--beta-min", "0.1", "--beta-max", "3", "--beta-num", str(args.num),
                  "--lambda-min", "0", "--lambda-max", "3", "--lambda-num", str(args.num)]))


if __name__ == "__main__":
    main()
