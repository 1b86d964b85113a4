#!/usr/bin/env python3
"""Emit plot-ready CSVs: the alpha-beta measure surfaces and the beta = 1 path.

Equivalent to `pconc sweep` / `pconc path`, bundled for one-shot figure
reproduction. Renders nothing; feed the CSVs to your plotting tool.
"""

import argparse
from pathlib import Path

from pconcurrence.cli import main as cli_main


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--grid-n", type=int, default=50)
    parser.add_argument("--outdir", type=Path, default=Path("results"))
    args = parser.parse_args()

    args.outdir.mkdir(parents=True, exist_ok=True)
    sweep_out = args.outdir / f"surface_grid{args.grid_n}.csv"
    path_out = args.outdir / f"path_beta1_grid{args.grid_n}.csv"
    rc = cli_main(["sweep", "--grid-n", str(args.grid_n), "--out", str(sweep_out)])
    rc |= cli_main(["path", "--grid-n", str(args.grid_n), "--out", str(path_out)])
    return rc


if __name__ == "__main__":
    raise SystemExit(main())
