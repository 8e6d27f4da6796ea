#!/usr/bin/env python3
"""Run the whole design study into one output tree.

Profile, metrics and sensitivity run at the nominal mechanism (p=50 mm,
eta=0.18, r=4 mm); the Pareto sweep and the fixed-size contour slices run on
the p=20 mm design space. Everything is deterministic, so re-running
reproduces the same files byte for byte.

Usage: python scripts/reproduce_study.py [outdir]
"""
import json
import sys
import tempfile
from pathlib import Path

from camdrive.cli import main

CONTOUR_M3 = {"contour": {"m": 3, "s_m_mm": 60.0}}


def run(outdir: Path) -> int:
    outdir.mkdir(parents=True, exist_ok=True)
    rc = 0
    rc |= main(["profile", "--out", str(outdir / "profile")])
    rc |= main(["metrics", "--out", str(outdir / "metrics")])
    rc |= main(["sensitivity", "--out", str(outdir / "sensitivity")])
    rc |= main(["pareto", "--out", str(outdir / "pareto")])
    rc |= main(["contour", "--out", str(outdir / "contour_m2")])
    with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
        json.dump(CONTOUR_M3, fh)
        cfg = fh.name
    rc |= main(["contour", "--config", cfg, "--out", str(outdir / "contour_m3")])
    Path(cfg).unlink()
    return rc


if __name__ == "__main__":
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("out/study")
    sys.exit(run(out))
