#!/usr/bin/env python3
"""Bare-vacuum decay on the 3-site periodic chain (exact + Trotter curves)."""
import sys
from pathlib import Path

from lgt.cli import main

CONFIG = Path(__file__).resolve().parent.parent / "configs" / "vacuum_decay.json"

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "out/vacuum_decay"
    sys.exit(main(["run", str(CONFIG), "--out", out]))
