"""Symmetric logarithmic derivative, static susceptibility and quantum Fisher information."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import expm

from .errors import DomainError
from .kdq import kd_table
from .qstate import DensityOperator, OrthonormalBasis

HERM_TOL = 1e-10
VACUOUS_EPS = 1e-12


def _hermitian(m, name: str) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError(f"{name} must be square, got shape {m.shape}")
    if np.max(np.abs(m - m.conj().T)) > HERM_TOL:
        raise DomainError(f"{name} is not Hermitian")
    return m


@dataclass(frozen=True, eq=False)
class StateDerivativePair:
    """A state and its derivative with respect to a scalar parameter at that point."""

    rho0: DensityOperator
    drho: np.ndarray

    def __post_init__(self):
        d = _hermitian(self.drho, "drho")
        if d.shape[0] != self.rho0.dim:
            raise DomainError(f"drho has dim {d.shape[0]}, state has {self.rho0.dim}")
        if abs(np.trace(d)) > HERM_TOL:
            raise DomainError(f"drho must be traceless, trace = {np.trace(d):.3e}")
        d = d.copy()
        d.setflags(write=False)
        object.__setattr__(self, "drho", d)

    @property
    def dim(self) -> int:
        return self.rho0.dim


@dataclass(frozen=True, eq=False)
class SLDResult:
    L: np.ndarray
    support_cutoff_used: bool
    residual: float


def sld(pair: StateDerivativePair, support_eps: float = 1e-12) -> SLDResult:
    """Solve ``(L rho + rho L)/2 = drho`` in the eigenbasis of rho.

    Components with ``p_i + p_j <= support_eps`` are set to zero, which picks the
    minimal-norm solution when rho is rank deficient.
    """
    p, v = np.linalg.eigh(pair.rho0.matrix)
    d_eig = v.conj().T @ pair.drho @ v
    denom = p[:, None] + p[None, :]
    keep = denom > support_eps
    l_eig = np.where(keep, 2 * d_eig / np.where(keep, denom, 1.0), 0)
    L = v @ l_eig @ v.conj().T
    L = (L + L.conj().T) / 2
    rho = pair.rho0.matrix
    residual = float(np.linalg.norm((L @ rho + rho @ L) / 2 - pair.drho))
    return SLDResult(L, bool(not keep.all()), residual)


def static_susceptibility(a_op, pair: StateDerivativePair) -> float:
    """``Re Tr(A L rho0)``."""
    a_op = _hermitian(a_op, "observable")
    if a_op.shape[0] != pair.dim:
        raise DomainError(f"observable has dim {a_op.shape[0]}, state has {pair.dim}")
    L = sld(pair).L
    return float(np.real(np.trace(a_op @ L @ pair.rho0.matrix)))


def _eig(op: np.ndarray, override: OrthonormalBasis | None):
    if override is None:
        w, v = np.linalg.eigh(op)
        return w, v
    v = override.columns
    w = np.real(np.diag(v.conj().T @ op @ v))
    if np.max(np.abs(op @ v - v * w)) > 1e-9:
        raise DomainError("override basis does not diagonalize the operator")
    return w, v


def kd_decomposition_check(a_op, pair: StateDerivativePair,
                           a_basis: OrthonormalBasis | None = None,
                           l_basis: OrthonormalBasis | None = None) -> float:
    """Largest pairwise discrepancy among three evaluations of the susceptibility.

    (1) operator trace ``Re Tr(A L rho0)``; (2) ``sum_ij a_i l_j Re q(a_i, l_j)``
    with q the KD table over eigenbases of A and L; (3) the same sum with
    ``a_i`` centered at ``Tr(A rho0)``. Eigenbases may be supplied to probe the
    independence from the choice inside degenerate eigenspaces.
    """
    a_op = _hermitian(a_op, "observable")
    if a_op.shape[0] != pair.dim:
        raise DomainError(f"observable has dim {a_op.shape[0]}, state has {pair.dim}")
    rho = pair.rho0.matrix
    L = sld(pair).L
    chi_trace = float(np.real(np.trace(a_op @ L @ rho)))
    a_w, a_v = _eig(a_op, a_basis)
    l_w, l_v = _eig(L, l_basis)
    re_q = kd_table(rho, a_v, l_v).real
    chi_sum = float(a_w @ re_q @ l_w)
    mean_a = float(np.real(np.trace(a_op @ rho)))
    chi_centered = float((a_w - mean_a) @ re_q @ l_w)
    vals = (chi_trace, chi_sum, chi_centered)
    return max(abs(x - y) for x in vals for y in vals)


def operator_norm(m: np.ndarray) -> float:
    """Largest absolute eigenvalue (the spectral norm for Hermitian input)."""
    return float(np.max(np.abs(np.linalg.eigvalsh(m))))


@dataclass(frozen=True)
class BoundCheck:
    normalized_value: float
    bound: float
    holds: bool
    vacuous: bool


def normalized_bound_check(a_op, pair: StateDerivativePair, coherence_value: float,
                           slack: float = 1e-6) -> BoundCheck:
    """``|chi| / (||A - <A>||  ||L||) <= C + 1``; C is coherence w.r.t. the eigenbasis of A."""
    a_op = _hermitian(a_op, "observable")
    chi = static_susceptibility(a_op, pair)
    mean_a = float(np.real(np.trace(a_op @ pair.rho0.matrix)))
    na = operator_norm(a_op - mean_a * np.eye(pair.dim))
    nl = operator_norm(sld(pair).L)
    bound = coherence_value + 1
    if na < VACUOUS_EPS or nl < VACUOUS_EPS:
        return BoundCheck(float("nan"), bound, True, True)
    val = abs(chi) / (na * nl)
    return BoundCheck(val, bound, val <= bound + slack, False)


def qfi(pair: StateDerivativePair) -> float:
    """Quantum Fisher information ``Tr(L^2 rho0)``."""
    L = sld(pair).L
    return max(0.0, float(np.real(np.trace(L @ L @ pair.rho0.matrix))))


def unitary_family(rho0: DensityOperator, h) -> Callable[[float], np.ndarray]:
    """``theta -> exp(-i theta H) rho0 exp(i theta H)``."""
    h = _hermitian(h, "generator")

    def family(theta: float) -> np.ndarray:
        u = expm(-1j * theta * h)
        return u @ rho0.matrix @ u.conj().T

    return family


def unitary_derivative(rho0: DensityOperator, h) -> np.ndarray:
    """Exact derivative of the unitary family at 0: ``-i [H, rho0]``."""
    h = _hermitian(h, "generator")
    return -1j * (h @ rho0.matrix - rho0.matrix @ h)


def derivative_fd(family: Callable[[float], np.ndarray], h: float = 1e-5, theta: float = 0.0) -> np.ndarray:
    """Central finite difference of a matrix-valued family."""
    d = (np.asarray(family(theta + h)) - np.asarray(family(theta - h))) / (2 * h)
    return (d + d.conj().T) / 2
