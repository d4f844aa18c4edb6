#!/usr/bin/env python3
"""Run the Lorenz benchmark preset and write its trace next to this script."""
import sys
from pathlib import Path

from nrhc.cli import main

if __name__ == "__main__":
    out = Path(__file__).resolve().parent.parent / "example1_trace.csv"
    sys.exit(main(["run", "--preset", "example1", "--out", str(out)] + sys.argv[1:]))
