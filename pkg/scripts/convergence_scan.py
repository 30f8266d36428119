#!/usr/bin/env python3
"""Temporal convergence scan of the unperturbed preset dynamics."""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from diracff.cli import main  # noqa: E402

if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--preset", choices=["fig1", "fig2"], default="fig1")
    parser.add_argument("--out", default="out/convergence")
    parser.add_argument("--grid-n", type=int, default=256)
    args = parser.parse_args()
    sys.exit(
        main([
            "convergence", "--preset", args.preset,
            "--out", args.out, "--grid-n", str(args.grid_n),
        ])
    )
