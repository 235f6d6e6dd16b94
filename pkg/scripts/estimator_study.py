"""Shot-noise study: error of the noisy objective versus shots, and SPSA traces.

    python3 scripts/estimator_study.py --repeats 100
"""
import argparse

import numpy as np

from kdcoh.coherence import OptimizerConfig
from kdcoh.estimator import SamplingModel, SPSAConfig, noisy_objective, variational_estimate
from kdcoh.qstate import BasisParams, OrthonormalBasis, pure_state


def run():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeats", type=int, default=100)
    ap.add_argument("--iterations", type=int, default=300)
    ap.add_argument("--gains", type=float, nargs="+", default=[0.2, 0.5, 1.0])
    ap.add_argument("--seeds", type=int, default=10)
    args = ap.parse_args()

    plus, a = pure_state([1, 1]), OrthonormalBasis.computational(2)
    exact = np.sqrt(2) - 1
    opt = BasisParams(2, [np.pi / 2, np.pi / 2])
    print("shots  mean|err|  frac<=0.01")
    for n in (10**3, 10**4, 10**5, 10**6):
        errs = np.array([abs(noisy_objective(plus, a, opt, SamplingModel(n, seed=s)) - exact)
                         for s in range(args.repeats)])
        print(f"{n:>7d}  {errs.mean():.2e}   {np.mean(errs <= 0.01):.2f}")

    print("\ngain  final values (SPSA from random starts, N=1e5)")
    for g in args.gains:
        vals = [variational_estimate(plus, a, OptimizerConfig(seed=s, starts=1), SamplingModel(10**5, seed=s),
                                     SPSAConfig(iterations=args.iterations, a=g), exact_reference=False).final_value
                for s in range(args.seeds)]
        hits = sum(abs(v - exact) <= 0.02 for v in vals)
        print(f"{g:4.2f}  within 0.02: {hits}/{args.seeds}  min {min(vals):.4f}  max {max(vals):.4f}")


if __name__ == "__main__":
    run()
