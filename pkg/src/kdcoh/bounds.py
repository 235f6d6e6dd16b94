"""Upper bounds on KD-nonclassicality coherence: l1-norm, measurement uncertainty, purity."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .coherence import OptimizationReport, array_digest, c_l1
from .errors import DomainError, UsageError
from .qstate import DensityOperator, OrthonormalBasis, purity

OPTIMIZER_SLACK = 1e-6
CLOSED_FORM_SLACK = 1e-12


def born_probabilities(rho: DensityOperator, a: OrthonormalBasis) -> np.ndarray:
    if rho.dim != a.dim:
        raise DomainError(f"dimension mismatch: state {rho.dim} vs basis {a.dim}")
    p = np.real(np.einsum("ia,ij,ja->a", a.columns.conj(), rho.matrix, a.columns))
    return np.clip(p, 0.0, None)


def measurement_uncertainty(rho: DensityOperator, a: OrthonormalBasis) -> float:
    """Half the order-1/2 Tsallis entropy of the outcome distribution: ``sum_a sqrt(p_a) - 1``."""
    return float(np.sqrt(born_probabilities(rho, a)).sum() - 1)


def tsallis_entropy(p, q: float) -> float:
    p = np.asarray(p, dtype=float)
    if q == 1:
        nz = p[p > 0]
        return float(-(nz * np.log(nz)).sum())
    return float((1 - np.sum(p ** q)) / (q - 1))


def purity_bound(rho: DensityOperator) -> float:
    """``sqrt(d Tr(rho^2)) - 1``."""
    return float(np.sqrt(rho.dim * purity(rho)) - 1)


def dim_bound(d: int) -> float:
    return float(np.sqrt(d) - 1)


@dataclass(frozen=True)
class BoundReport:
    c_value: float
    l1: float
    measurement_uncertainty: float
    purity_bound: float
    dim_bound: float
    all_satisfied: bool
    slack: float

    def checks(self) -> dict[str, bool]:
        s = self.slack
        return {
            "l1": self.c_value <= self.l1 + s,
            "measurement_uncertainty": self.c_value <= self.measurement_uncertainty + s,
            "purity_bound": self.c_value <= self.purity_bound + s,
            "dim_bound": self.c_value <= self.dim_bound + s,
        }

    def to_dict(self) -> dict:
        return asdict(self) | {"checks": self.checks()}


def verify_bounds(rho: DensityOperator, a: OrthonormalBasis, report: OptimizationReport,
                  slack: float = OPTIMIZER_SLACK) -> BoundReport:
    """Compare an optimized nonclassicality value with every closed-form upper bound."""
    if report.quantity != "ncl":
        raise UsageError(f"bounds apply to the nonclassicality quantifier, report holds {report.quantity!r}")
    if report.state_digest != array_digest(rho.matrix) or report.basis_digest != array_digest(a.columns):
        raise UsageError("optimization report was not generated from this state and incoherent basis")
    c = report.value
    l1 = c_l1(rho, a)
    mu = measurement_uncertainty(rho, a)
    pb = purity_bound(rho)
    db = dim_bound(rho.dim)
    ok = all(c <= b + slack for b in (l1, mu, pb, db))
    return BoundReport(c, l1, mu, pb, db, ok, slack)
