#!/usr/bin/env python3
"""Run the two-state benchmark preset and write its trace next to this script."""
import sys
from pathlib import Path

from nrhc.cli import main

if __name__ == "__main__":
    out = Path(__file__).resolve().parent.parent / "example2_trace.csv"
    sys.exit(main(["run", "--preset", "example2", "--out", str(out)] + sys.argv[1:]))
