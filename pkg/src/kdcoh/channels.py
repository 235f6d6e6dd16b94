"""Maps used by the monotonicity properties: dephasing, coarse-graining, conjugation, CIP channels."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .kdq import FunctionalReport, kd_table
from .qstate import DensityOperator, OrthonormalBasis, PartitionSpec

UNITARY_TOL = 1e-10


def _check_dims(*objs):
    if len({o.dim for o in objs}) != 1:
        raise DomainError(f"dimension mismatch: {[o.dim for o in objs]}")


def dephase(rho: DensityOperator, a: OrthonormalBasis) -> DensityOperator:
    """``sum_a Pi_a rho Pi_a``."""
    _check_dims(rho, a)
    m = a.columns.conj().T @ rho.matrix @ a.columns
    return DensityOperator(a.columns @ np.diag(np.diag(m)) @ a.columns.conj().T, rho.subsystem_dims)


def dephase_mix(rho: DensityOperator, a: OrthonormalBasis, p: float) -> DensityOperator:
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"mixing weight must lie in [0, 1], got {p}")
    m = p * rho.matrix + (1 - p) * dephase(rho, a).matrix
    return DensityOperator(m, rho.subsystem_dims)


@dataclass(frozen=True, eq=False)
class CoarseKD:
    table: np.ndarray  # rows: partition blocks, columns: second-basis index
    functionals: FunctionalReport


def coarse_grain_kd(rho: DensityOperator, a: OrthonormalBasis, part: PartitionSpec,
                    b: OrthonormalBasis) -> CoarseKD:
    """KD table with rows summed over each block of ``part``: ``Tr(Pi_b Pi_A rho)``."""
    _check_dims(rho, a, b)
    part.validate(a.dim)
    q = kd_table(rho.matrix, a.columns, b.columns)
    coarse = np.array([q[list(blk)].sum(axis=0) for blk in part.blocks])
    rep = FunctionalReport(
        ncl=max(0.0, float(np.abs(coarse).sum() - 1)),
        neg=max(0.0, float(np.abs(coarse.real).sum() - 1)),
        nre=float(np.abs(coarse.imag).sum()),
    )
    return CoarseKD(coarse, rep)


def check_unitary(u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise DomainError(f"unitary must be square, got shape {u.shape}")
    err = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    if err > UNITARY_TOL:
        raise DomainError(f"matrix is not unitary (max deviation {err:.3e})")
    return u


def conjugate(rho: DensityOperator, a: OrthonormalBasis, u: np.ndarray
              ) -> tuple[DensityOperator, OrthonormalBasis]:
    """Jointly rotate state and incoherent basis: ``(U rho U^dag, {U|a>})``."""
    _check_dims(rho, a)
    u = check_unitary(u)
    if u.shape[0] != rho.dim:
        raise DomainError(f"unitary has dim {u.shape[0]}, state has {rho.dim}")
    return DensityOperator(u @ rho.matrix @ u.conj().T), OrthonormalBasis(u @ a.columns)


@dataclass(frozen=True, eq=False)
class CIPSpec:
    """Ancilla outcome probabilities r_e and the permutation mu_e applied for each outcome."""

    probs: np.ndarray
    perms: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        r = np.asarray(self.probs, dtype=float).ravel()
        perms = tuple(tuple(int(i) for i in p) for p in self.perms)
        if r.size == 0 or r.size != len(perms):
            raise DomainError(f"need one permutation per ancilla outcome ({r.size} probs, {len(perms)} perms)")
        if np.any(r < 0) or abs(r.sum() - 1) > 1e-12:
            raise DomainError("ancilla probabilities must be nonnegative and sum to 1")
        d = len(perms[0])
        for p in perms:
            if sorted(p) != list(range(d)):
                raise DomainError(f"{p} is not a permutation of range({d})")
        object.__setattr__(self, "probs", r)
        object.__setattr__(self, "perms", perms)

    @property
    def dim(self) -> int:
        return len(self.perms[0])


def permutation_matrix(perm) -> np.ndarray:
    """``P |a> = |perm[a]>``."""
    d = len(perm)
    p = np.zeros((d, d), dtype=complex)
    p[list(perm), np.arange(d)] = 1
    return p


def phi_cip(rho: DensityOperator, spec: CIPSpec) -> DensityOperator:
    """Controlled incoherent permutation channel, Kraus form ``sum_e r_e P_e rho P_e^dag``."""
    if spec.dim != rho.dim:
        raise DomainError(f"permutations act on dim {spec.dim}, state has dim {rho.dim}")
    m = sum(r * (p @ rho.matrix @ p.conj().T)
            for r, p in zip(spec.probs, map(permutation_matrix, spec.perms)))
    return DensityOperator(m, rho.subsystem_dims)


def cip_unitary(spec: CIPSpec) -> np.ndarray:
    """System-ancilla unitary ``U |a>|e> = |mu_e(a)>|e>`` (system factor first)."""
    n = len(spec.perms)
    u = np.zeros((spec.dim * n, spec.dim * n), dtype=complex)
    for e, perm in enumerate(spec.perms):
        proj = np.zeros((n, n))
        proj[e, e] = 1
        u += np.kron(permutation_matrix(perm), proj)
    return u


def phi_cip_dilation(rho: DensityOperator, spec: CIPSpec) -> DensityOperator:
    """Same channel computed literally: ``Tr_E(U (rho x rho_E) U^dag)`` with incoherent ``rho_E``."""
    if spec.dim != rho.dim:
        raise DomainError(f"permutations act on dim {spec.dim}, state has dim {rho.dim}")
    n = len(spec.perms)
    u = cip_unitary(spec)
    joint = u @ np.kron(rho.matrix, np.diag(spec.probs).astype(complex)) @ u.conj().T
    d = rho.dim
    reduced = np.trace(joint.reshape(d, n, d, n), axis1=1, axis2=3)
    return DensityOperator(reduced, rho.subsystem_dims)


def random_incoherent_kraus(d: int, n_kraus: int, seed: int = 0) -> list[np.ndarray]:
    """Random trace-preserving Kraus set in which every operator maps basis states to basis states.

    Two families are mixed, each incoherent by construction: permutation times
    diagonal operators, and rank-one maps ``|c><v|`` obtained by splitting an
    isometry row by row. Per column a, a fraction ``t_a`` of the weight goes
    to the first family. Returns ``n_perm + d * n_iso`` operators where
    ``n_perm = max(1, n_kraus // 2)`` and ``n_iso = max(1, n_kraus - n_perm)``.
    Used only by the exploratory monotonicity harness.
    """
    rng = np.random.default_rng(seed)
    n_perm = max(1, n_kraus // 2)
    n_iso = max(1, n_kraus - n_perm)
    t = rng.uniform(0.2, 0.8, d)
    c = rng.standard_normal((n_perm, d)) + 1j * rng.standard_normal((n_perm, d))
    c *= np.sqrt(t / (np.abs(c) ** 2).sum(axis=0))
    kraus = [permutation_matrix(rng.permutation(d)) @ np.diag(ck) for ck in c]
    g = rng.standard_normal((n_iso * d, d)) + 1j * rng.standard_normal((n_iso * d, d))
    w, _ = np.linalg.qr(g)
    v = w @ np.diag(np.sqrt(1 - t))
    for r, row in enumerate(v):
        k = np.zeros((d, d), dtype=complex)
        k[r % d] = row
        kraus.append(k)
    return kraus


def apply_kraus(rho: DensityOperator, kraus: list[np.ndarray]) -> DensityOperator:
    m = sum(k @ rho.matrix @ k.conj().T for k in kraus)
    return DensityOperator(m, rho.subsystem_dims)
