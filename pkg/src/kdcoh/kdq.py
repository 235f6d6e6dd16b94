"""Kirkwood-Dirac quasiprobability tables and their nonclassicality functionals."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularOverlapError
from .qstate import DensityOperator, OrthonormalBasis

NORM_TOL = 1e-10
CLAMP_TOL = 1e-10
OVERLAP_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class KDDistribution:
    """Table ``q[a, b] = Tr(Pi_b Pi_a rho)``; rows index the first basis."""

    table: np.ndarray
    a_basis: OrthonormalBasis | None = None
    b_basis: OrthonormalBasis | None = None

    def __post_init__(self):
        t = np.array(self.table, dtype=complex)
        if t.ndim != 2 or t.shape[0] != t.shape[1]:
            raise DomainError(f"KD table must be square, got shape {t.shape}")
        total = t.sum()
        if abs(total - 1) > NORM_TOL:
            raise DomainError(f"KD table sums to {total:.12g}, expected 1")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @property
    def dim(self) -> int:
        return self.table.shape[0]


@dataclass(frozen=True)
class FunctionalReport:
    ncl: float
    neg: float
    nre: float


def _check_dims(*objs):
    dims = {o.dim for o in objs}
    if len(dims) != 1:
        raise DomainError(f"dimension mismatch: {[o.dim for o in objs]}")


def kd_table(rho: np.ndarray, a_cols: np.ndarray, b_cols: np.ndarray) -> np.ndarray:
    """Raw KD table from matrices, ``<b|a><a|rho|b>``; no validation."""
    ad = a_cols.conj().T
    return np.conj(ad @ b_cols) * (ad @ rho @ b_cols)


def kd_distribution(rho: DensityOperator, a: OrthonormalBasis, b: OrthonormalBasis) -> KDDistribution:
    _check_dims(rho, a, b)
    q = kd_table(rho.matrix, a.columns, b.columns)
    kd = KDDistribution(q, a, b)
    pa = np.real(np.einsum("ia,ij,ja->a", a.columns.conj(), rho.matrix, a.columns))
    pb = np.real(np.einsum("ib,ij,jb->b", b.columns.conj(), rho.matrix, b.columns))
    err = max(np.max(np.abs(q.sum(axis=1) - pa)), np.max(np.abs(q.sum(axis=0) - pb)))
    if err > NORM_TOL:
        raise DomainError(f"KD marginals disagree with Born probabilities by {err:.3e}")
    return kd


def _clamp(x: float) -> float:
    if x < -CLAMP_TOL:
        raise DomainError(f"functional is negative beyond rounding ({x:.3e}); table is not a KD distribution")
    return max(0.0, float(x))


def functionals(kd: KDDistribution) -> FunctionalReport:
    """Nonclassicality ``sum|q| - 1``, negativity ``sum|Re q| - 1`` and nonreality ``sum|Im q|``."""
    q = kd.table
    return FunctionalReport(
        ncl=_clamp(np.abs(q).sum() - 1),
        neg=_clamp(np.abs(q.real).sum() - 1),
        nre=_clamp(np.abs(q.imag).sum()),
    )


def overlap_amplification(a: OrthonormalBasis, b: OrthonormalBasis) -> float:
    """``1 / min |<a|b>|``: how much table errors are amplified by reconstruction."""
    _check_dims(a, b)
    m = np.min(np.abs(a.columns.conj().T @ b.columns))
    return np.inf if m == 0 else float(1 / m)


def reconstruct_state(kd: KDDistribution, a: OrthonormalBasis, b: OrthonormalBasis) -> DensityOperator:
    """Invert the KD map: ``rho = sum_ab q[a, b] |a><b| / <b|a>``."""
    _check_dims(kd, a, b)
    ov = a.columns.conj().T @ b.columns  # <a|b>
    if np.min(np.abs(ov)) <= OVERLAP_EPS:
        raise SingularOverlapError("bases have orthogonal vector pairs; KD table does not determine the state")
    coeff = kd.table / np.conj(ov)
    m = a.columns @ coeff @ b.columns.conj().T
    return DensityOperator((m + m.conj().T) / 2)


def expectation_from_kd(kd: KDDistribution, a_weights, b_weights) -> complex:
    """``sum_ab a_w b_w q[a, b]``, i.e. ``Tr(B A rho)`` for A, B diagonal in the two bases."""
    return complex(np.asarray(a_weights) @ kd.table @ np.asarray(b_weights))
