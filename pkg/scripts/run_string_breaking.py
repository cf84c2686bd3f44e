#!/usr/bin/env python3
"""Flux-string breaking on the open 3-site chain, light and heavy mass."""
import sys
from pathlib import Path

from lgt.cli import main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "out/string_breaking"
    rc = main(["run", str(CONFIGS / "string_breaking_1d_light.json"), "--out", out])
    rc |= main(["run", str(CONFIGS / "string_breaking_1d_heavy.json"), "--out", out])
    sys.exit(rc)
