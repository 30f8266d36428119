#!/usr/bin/env python3
"""Linear-field experiment at figure scale (Crank-Nicolson, bounded box)."""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from diracff.cli import main  # noqa: E402

if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out/fig2")
    args = parser.parse_args()
    sys.exit(main(["run", "--preset", "fig2", "--out", args.out]))
