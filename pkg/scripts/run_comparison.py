#!/usr/bin/env python3
"""Run the paired machine comparison and drop the full CSV/SVG bundle.

Thin wrapper around pkm.sweep.run_comparison for batch use; the pkm CLI
exposes the same pipeline with config-file support.
"""
import argparse
import sys
import time
from pathlib import Path

from pkm.config import SweepSettings
from pkm.geometry import Variant, default_params
from pkm.sweep import CompareSettings, run_comparison


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("out/comparison"))
    parser.add_argument("--grid", type=int, default=121)
    parser.add_argument("--tilt-max-deg", type=float, default=40.0)
    parser.add_argument("--kappa-min-inv", type=float, default=0.05)
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args()

    settings = CompareSettings(
        params_z3=default_params(Variant.Z3_PRS),
        params_a3=default_params(Variant.A3_RPS),
        out_dir=args.out,
        sweep=SweepSettings(
            grid_n=args.grid,
            tilt_max_deg=args.tilt_max_deg,
            kappa_min_inv=args.kappa_min_inv,
        ),
        workers=args.workers,
    )
    start = time.perf_counter()
    report = run_comparison(settings)
    sys.stdout.write(report.as_text())
    print(f"\nwrote {args.out} in {time.perf_counter() - start:.1f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
