"""Exploratory check of monotonicity under random incoherent channels (qubits, grid oracle).

Monotonicity under general incoherent operations is an open question; this
script only reports what it finds and asserts nothing.

    python3 scripts/incoherent_harness.py --trials 200
"""
import argparse

import numpy as np

from kdcoh.channels import apply_kraus, random_incoherent_kraus
from kdcoh.coherence import c_l1, grid_oracle_qubit
from kdcoh.qstate import OrthonormalBasis, random_density


def run():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--kraus", type=int, default=3)
    ap.add_argument("--grid-n", type=int, default=300)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    a = OrthonormalBasis.computational(2)
    deltas, l1_deltas = [], []
    for t in range(args.trials):
        rho = random_density(2, seed=args.seed * 100_000 + t)
        out = apply_kraus(rho, random_incoherent_kraus(2, args.kraus, seed=args.seed * 100_000 + t))
        deltas.append(grid_oracle_qubit(out, a, grid_n=args.grid_n) - grid_oracle_qubit(rho, a, grid_n=args.grid_n))
        l1_deltas.append(c_l1(out, a) - c_l1(rho, a))
    deltas = np.array(deltas)
    print(f"trials: {args.trials}")
    print(f"C_NCl increases (> 1e-6): {np.sum(deltas > 1e-6)}   max increase {deltas.max():.3e}")
    print(f"C_l1  increases (> 1e-12): {np.sum(np.array(l1_deltas) > 1e-12)}  (l1 is a known monotone; sanity)")


if __name__ == "__main__":
    run()
