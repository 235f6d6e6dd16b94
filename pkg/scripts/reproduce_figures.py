"""Write the qubit sweeps behind both figures and print the anchor checks.

    python3 scripts/reproduce_figures.py --out-dir results/
"""
import argparse
from pathlib import Path

import numpy as np

from kdcoh.cli import main as cli_main
from kdcoh.reproduce import qubit_sweep


def anchors(rows):
    top = [r for r in rows if r["r"] == 1.0 and abs(r["theta"] - np.pi / 2) < 1e-12]
    pure = [r for r in rows if r["r"] == 1.0]
    mid = sorted((r for r in rows if abs(r["theta"] - np.pi / 2) < 1e-12), key=lambda r: -r["r"])
    print(f"r=1, theta=pi/2: C_NCl={top[0]['C_KD_NCl']:.6f} (sqrt2-1={np.sqrt(2) - 1:.6f}), C_l1={top[0]['C_l1']:.6f}")
    print(f"r=1: max |C_NRe - C_l1| = {max(abs(r['C_KD_NRe'] - r['C_l1']) for r in pure):.2e}")
    print(f"r=1: max |C_NCl - MU|   = {max(abs(r['C_KD_NCl'] - r['MU']) for r in pure):.2e}")
    print("theta=pi/2, r decreasing: C_NCl", [round(r["C_KD_NCl"], 4) for r in mid],
          "MU", [round(r["MU"], 4) for r in mid])


def run():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out-dir", default="results")
    ap.add_argument("--theta-points", type=int, default=41)
    ap.add_argument("--r", type=float, nargs="+", default=[1.0, 0.8, 0.5, 0.0])
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    common = ["--theta-points", str(args.theta_points), "--r", *map(str, args.r)]
    rc = cli_main(["figure1", *common, "--out", str(out / "figure1.csv")])
    rc |= cli_main(["figure2", *common, "--out", str(out / "figure2.csv")])
    # odd theta_points keeps pi/2 on the grid for the anchors
    anchors(qubit_sweep(args.r, args.theta_points if args.theta_points % 2 else args.theta_points + 1))
    return rc


if __name__ == "__main__":
    raise SystemExit(run())
