"""Worked wind + solar example: IPS sum, contour, maximum gap, all-sources dilution.

Usage: python3 scripts/reproduce_section5.py [--config configs/section5.yaml] [--out DIR]
"""

import argparse
from pathlib import Path

from ipsuncert import cli

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", default=ROOT / "configs" / "section5.yaml")
    ap.add_argument("--out", help="directory for report.json and curves.csv")
    args = ap.parse_args()
    cli.cmd_compose(args.config, args.out)


if __name__ == "__main__":
    main()
