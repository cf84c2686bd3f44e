#!/usr/bin/env python3
"""Per-link Pauli counts and qubit-register tables as CSV."""
import sys
from pathlib import Path

from lgt.cli import main

CONFIG = Path(__file__).resolve().parent.parent / "configs" / "resource_report.json"

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "out/resources"
    sys.exit(main(["resources", str(CONFIG), "--out", out]))
