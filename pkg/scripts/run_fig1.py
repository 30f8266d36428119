#!/usr/bin/env python3
"""Homogeneous-field experiment at figure scale.

Runs the unperturbed and transported evolutions, writes ratio_profile.csv,
potentials.csv, summary.json and runtime.json into --out, and exits nonzero
if any threshold fails.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from diracff.cli import main  # noqa: E402

if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out/fig1")
    args = parser.parse_args()
    sys.exit(main(["run", "--preset", "fig1", "--out", args.out]))
