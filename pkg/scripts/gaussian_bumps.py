"""Two-parameter family of shifted Gaussian bumps on a triangulated square.

Extracts the uncertain critical points, estimates the density of each
extremum and writes components.json, density.json and plot.svg into --out.
"""

import argparse
from pathlib import Path

from uncrit.cli import main as cli_main


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--resolution", type=int, default=21)
    ap.add_argument("--samples", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=Path("out/gaussian_bumps"))
    args = ap.parse_args()
    common = ["--case", "gaussian-bumps", "--resolution", str(args.resolution), "--out", str(args.out)]
    code = cli_main(["extract", *common])
    if code == 0:
        code = cli_main(["density", *common, "--samples", str(args.samples), "--seed", str(args.seed), "--svg",
                         "--interpolate-display"])
    raise SystemExit(code)


if __name__ == "__main__":
    main()
