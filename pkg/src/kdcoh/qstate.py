"""States, orthonormal bases and the Givens chart over the space of bases."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import Sequence

import numpy as np
from scipy.stats import unitary_group

from .errors import DomainError

VALIDATION_TOL = 1e-10
PHASE_EPS = 1e-12


def _as_dims(subsystem_dims, dim):
    if subsystem_dims is None:
        return None
    dims = tuple(int(x) for x in subsystem_dims)
    if any(x < 1 for x in dims) or int(np.prod(dims)) != dim:
        raise DomainError(f"subsystem_dims {dims} do not multiply to dim {dim}")
    return dims


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Validated density matrix: Hermitian, unit trace, positive semidefinite."""

    matrix: np.ndarray
    subsystem_dims: tuple[int, ...] | None = None

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise DomainError(f"density matrix must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise DomainError("density matrix has non-finite entries")
        herm_err = np.max(np.abs(m - m.conj().T))
        if herm_err > VALIDATION_TOL:
            raise DomainError(f"matrix is not Hermitian (max deviation {herm_err:.3e})")
        tr = np.trace(m)
        if abs(tr - 1) > VALIDATION_TOL:
            raise DomainError(f"trace is {tr.real:.12g}, expected 1")
        lam_min = np.linalg.eigvalsh((m + m.conj().T) / 2)[0]
        if lam_min < -VALIDATION_TOL:
            raise DomainError(f"matrix is not positive semidefinite (eigenvalue {lam_min:.3e})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "subsystem_dims", _as_dims(self.subsystem_dims, m.shape[0]))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def with_dims(self, subsystem_dims) -> "DensityOperator":
        return DensityOperator(self.matrix, subsystem_dims)


def canonicalize_columns(columns: np.ndarray) -> np.ndarray:
    """Rotate each column so its first entry of magnitude > 1e-12 is real and >= 0."""
    out = np.array(columns, dtype=complex)
    for j in range(out.shape[1]):
        col = out[:, j]
        idx = np.flatnonzero(np.abs(col) > PHASE_EPS)
        if idx.size:
            x = col[idx[0]]
            out[:, j] = col * (np.conj(x) / abs(x))
    return out


@dataclass(frozen=True, eq=False)
class OrthonormalBasis:
    """Ordered orthonormal basis; ``columns[:, j]`` is the j-th basis vector.

    Columns are phase-canonicalized on construction. ``subsystem_dims`` marks a
    declared product basis.
    """

    columns: np.ndarray
    subsystem_dims: tuple[int, ...] | None = None

    def __post_init__(self):
        c = np.array(self.columns, dtype=complex)
        if c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] < 1:
            raise DomainError(f"basis matrix must be square, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise DomainError("basis matrix has non-finite entries")
        err = np.max(np.abs(c.conj().T @ c - np.eye(c.shape[0])))
        if err > VALIDATION_TOL:
            raise DomainError(f"columns are not orthonormal (max deviation {err:.3e})")
        c = canonicalize_columns(c)
        c.setflags(write=False)
        object.__setattr__(self, "columns", c)
        object.__setattr__(self, "subsystem_dims", _as_dims(self.subsystem_dims, c.shape[0]))

    @property
    def dim(self) -> int:
        return self.columns.shape[0]

    @property
    def is_product(self) -> bool:
        return self.subsystem_dims is not None and len(self.subsystem_dims) > 1

    @property
    def projectors(self) -> np.ndarray:
        """Array of shape (d, d, d); ``projectors[k]`` is |k><k|."""
        c = self.columns
        return np.einsum("ik,jk->kij", c, c.conj())

    def vector(self, k: int) -> np.ndarray:
        return self.columns[:, k]

    @classmethod
    def computational(cls, dim: int, subsystem_dims=None) -> "OrthonormalBasis":
        return cls(np.eye(dim, dtype=complex), subsystem_dims)

    @classmethod
    def fourier(cls, dim: int) -> "OrthonormalBasis":
        k = np.arange(dim)
        return cls(np.exp(2j * np.pi * np.outer(k, k) / dim) / np.sqrt(dim))

    @classmethod
    def eigenbasis(cls, op: np.ndarray) -> tuple[np.ndarray, "OrthonormalBasis"]:
        """Eigenvalues (ascending) and eigenvectors of a Hermitian matrix."""
        op = np.asarray(op, dtype=complex)
        w, v = np.linalg.eigh((op + op.conj().T) / 2)
        return w, cls(v)


def tensor_basis(*bases: OrthonormalBasis) -> OrthonormalBasis:
    cols = reduce(np.kron, [b.columns for b in bases])
    return OrthonormalBasis(cols, tuple(b.dim for b in bases))


def bloch_qubit(r: float, theta: float, phi: float) -> DensityOperator:
    """Qubit state with Bloch vector of length r at polar angle theta, azimuth phi."""
    if not 0.0 <= r <= 1.0:
        raise DomainError(f"Bloch radius must lie in [0, 1], got {r}")
    off = r * np.sin(theta) * np.exp(-1j * phi) / 2
    m = np.array(
        [[(1 + r * np.cos(theta)) / 2, off], [np.conj(off), (1 - r * np.cos(theta)) / 2]],
        dtype=complex,
    )
    return DensityOperator(m)


def pure_state(psi: Sequence[complex], subsystem_dims=None) -> DensityOperator:
    psi = np.asarray(psi, dtype=complex).ravel()
    norm = np.linalg.norm(psi)
    if not norm > 0 or not np.isfinite(norm):
        raise DomainError("state vector must be nonzero and finite")
    psi = psi / norm
    return DensityOperator(np.outer(psi, psi.conj()), subsystem_dims)


def maximally_mixed(dim: int, subsystem_dims=None) -> DensityOperator:
    return DensityOperator(np.eye(dim, dtype=complex) / dim, subsystem_dims)


def maximally_coherent(dim: int, phases=None, subsystem_dims=None) -> DensityOperator:
    phases = np.zeros(dim) if phases is None else np.asarray(phases, dtype=float)
    return pure_state(np.exp(1j * phases) / np.sqrt(dim), subsystem_dims)


def qubit_basis(alpha: float, beta: float) -> OrthonormalBasis:
    c, s = np.cos(alpha / 2), np.sin(alpha / 2)
    e = np.exp(1j * beta)
    return OrthonormalBasis(np.array([[c, s], [s * e, -c * e]], dtype=complex))


@lru_cache(maxsize=None)
def _pairs(dim: int) -> tuple[tuple[int, int], ...]:
    return tuple((i, j) for i in range(dim) for j in range(i + 1, dim))


def chart_size(dim: int) -> int:
    """Number of real angles in the Givens chart of bases in dimension ``dim``."""
    return dim * (dim - 1)


@dataclass(frozen=True, eq=False)
class BasisParams:
    """Angles locating a basis in the Givens chart.

    Unconstrained mode (``subsystem_dims is None``) stores, for every index pair
    (i, j), i < j, in lexicographic order, a mixing angle in [0, pi] followed by
    a relative phase in [0, 2 pi). Product mode concatenates one such chart per
    subsystem; for qubits each block is the (alpha, beta) pair of ``qubit_basis``.
    """

    dim: int
    angles: np.ndarray
    subsystem_dims: tuple[int, ...] | None = None

    def __post_init__(self):
        a = np.array(self.angles, dtype=float).ravel()
        dims = _as_dims(self.subsystem_dims, self.dim)
        expected = chart_size(self.dim) if dims is None else sum(chart_size(k) for k in dims)
        if a.size != expected:
            raise DomainError(f"expected {expected} angles for dim {self.dim}, got {a.size}")
        a.setflags(write=False)
        object.__setattr__(self, "angles", a)
        object.__setattr__(self, "subsystem_dims", dims)

    @property
    def mode(self) -> str:
        return "full" if self.subsystem_dims is None else "product"

    @property
    def product_structure(self) -> list[np.ndarray]:
        """Per-subsystem angle blocks (a single block in unconstrained mode)."""
        dims = self.subsystem_dims or (self.dim,)
        out, k = [], 0
        for d in dims:
            n = chart_size(d)
            out.append(self.angles[k:k + n])
            k += n
        return out


def givens_unitary(dim: int, angles) -> np.ndarray:
    """Product of two-level rotations over index pairs applied to the identity (no canonicalization).

    Plain-Python inner loop: at d <= 8 this is several times faster than
    per-rotation numpy slicing, and it sits on the optimizer's hot path.
    """
    cols = [[1.0 + 0j if r == c else 0j for r in range(dim)] for c in range(dim)]
    for n, (i, j) in enumerate(_pairs(dim)):
        theta = 0.5 * float(angles[2 * n])
        c, s = math.cos(theta), math.sin(theta)
        e = cmath.exp(1j * float(angles[2 * n + 1]))
        es, ecs = e * s, e.conjugate() * s
        ci, cj = cols[i], cols[j]
        cols[i] = [c * x + es * y for x, y in zip(ci, cj)]
        cols[j] = [c * y - ecs * x for x, y in zip(ci, cj)]
    return np.array(cols, dtype=complex).T


def params_unitary(p: BasisParams) -> np.ndarray:
    """Unitary whose columns span the basis of ``p``, before phase canonicalization."""
    if p.subsystem_dims is None:
        return givens_unitary(p.dim, p.angles)
    blocks = [givens_unitary(d, a) for d, a in zip(p.subsystem_dims, p.product_structure)]
    return reduce(np.kron, blocks)


def basis_from_params(p: BasisParams) -> OrthonormalBasis:
    return OrthonormalBasis(params_unitary(p), p.subsystem_dims)


def _givens_angles(columns: np.ndarray) -> np.ndarray:
    v = np.array(columns, dtype=complex)
    dim = v.shape[0]
    angles = np.zeros(chart_size(dim))
    for n, (i, k) in enumerate(_pairs(dim)):
        x0, xk = v[i, i], v[k, i]
        theta = np.arctan2(abs(xk), abs(x0))
        phi = 0.0
        if abs(xk) > PHASE_EPS:
            phi = np.angle(xk) - (np.angle(x0) if abs(x0) > PHASE_EPS else 0.0)
        phi = float(np.mod(phi, 2 * np.pi))
        angles[2 * n], angles[2 * n + 1] = 2 * theta, phi
        c, s, e = np.cos(theta), np.sin(theta), np.exp(1j * phi)
        ri, rk = v[i].copy(), v[k]
        v[i] = c * ri + np.conj(e) * s * rk
        v[k] = -e * s * ri + c * rk
    return angles


def params_from_basis(basis: OrthonormalBasis, subsystem_dims=None) -> BasisParams:
    """Chart coordinates of ``basis``; inverse of ``basis_from_params`` up to column phases.

    In product mode the basis must be an exact tensor product over ``subsystem_dims``
    in the factor ordering used by ``tensor_basis``.
    """
    dims = _as_dims(subsystem_dims, basis.dim)
    if dims is None:
        return BasisParams(basis.dim, _givens_angles(basis.columns))
    blocks = [_givens_angles(f.columns) for f in factorize_product_basis(basis, dims)]
    return BasisParams(basis.dim, np.concatenate(blocks), dims)


def factorize_product_basis(basis: OrthonormalBasis, dims) -> list[OrthonormalBasis]:
    """Split a tensor-product basis into its factors (up to column phases)."""
    dims = tuple(dims)
    cols = basis.columns.reshape(dims + dims)
    n = len(dims)
    factors = []
    for k in range(n):
        # fix all other factor indices at 0 (row: first nonzero entry per column)
        mats = np.moveaxis(cols, (k, n + k), (0, 1)).reshape(dims[k], dims[k], -1)
        best = np.argmax(np.linalg.norm(mats, axis=(0, 1)))
        m = mats[:, :, best]
        m = m / np.linalg.norm(m, axis=0, keepdims=True)
        factors.append(OrthonormalBasis(m))
    rebuilt = tensor_basis(*factors)
    if basis_distance(rebuilt, basis) > 1e-8:
        raise DomainError("basis is not a tensor product over the given subsystem_dims")
    return factors


def wrap_params(p: BasisParams) -> BasisParams:
    """Canonical representative: mixing angles in [0, pi], phases in [0, 2 pi)."""
    return params_from_basis(basis_from_params(p), p.subsystem_dims)


def random_params(dim: int, rng: np.random.Generator, subsystem_dims=None) -> BasisParams:
    dims = _as_dims(subsystem_dims, dim)
    n = chart_size(dim) if dims is None else sum(chart_size(k) for k in dims)
    a = rng.uniform(0, 2 * np.pi, size=n)
    a[0::2] = rng.uniform(0, np.pi, size=n // 2)
    return BasisParams(dim, a, dims)


def basis_distance(a: OrthonormalBasis, b: OrthonormalBasis) -> float:
    """Column-phase-invariant distance: sqrt(sum_j min_phi |b_j - e^{i phi} a_j|^2)."""
    ov = np.einsum("ij,ij->j", a.columns.conj(), b.columns)
    mag = np.abs(ov)
    ph = np.where(mag > PHASE_EPS, ov / np.where(mag > PHASE_EPS, mag, 1.0), 1.0)
    return float(np.linalg.norm(b.columns - a.columns * ph))


def purity(rho: DensityOperator) -> float:
    m = rho.matrix
    return float(np.real(np.vdot(m, m)))


def is_mub(a: OrthonormalBasis, b: OrthonormalBasis, tol: float = 1e-10) -> bool:
    if a.dim != b.dim:
        raise DomainError(f"dimension mismatch: {a.dim} vs {b.dim}")
    ov = np.abs(a.columns.conj().T @ b.columns)
    return bool(np.max(np.abs(ov - 1 / np.sqrt(a.dim))) <= tol)


def partial_trace(rho: DensityOperator, keep: int) -> DensityOperator:
    """Reduced state on subsystem ``keep`` (0-based)."""
    dims = rho.subsystem_dims
    if dims is None or len(dims) < 2:
        raise DomainError("partial_trace needs a state with at least two subsystems")
    if not 0 <= keep < len(dims):
        raise DomainError(f"subsystem index {keep} out of range for dims {dims}")
    n = len(dims)
    t = rho.matrix.reshape(dims + dims)
    for k in reversed(range(n)):
        if k != keep:
            t = np.trace(t, axis1=k, axis2=k + t.ndim // 2)
    return DensityOperator(t)


def random_density(d: int, rank: int | None = None, seed: int = 0, subsystem_dims=None) -> DensityOperator:
    """Hilbert-Schmidt (Ginibre) random state of the given rank, deterministic per seed."""
    rank = d if rank is None else rank
    if not 1 <= rank <= d:
        raise DomainError(f"rank must lie in [1, {d}], got {rank}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    m = g @ g.conj().T
    m = (m + m.conj().T) / 2
    return DensityOperator(m / np.trace(m).real, subsystem_dims)


def random_unitary(d: int, seed: int = 0) -> np.ndarray:
    return unitary_group.rvs(d, random_state=np.random.default_rng(seed)).astype(complex)


def random_basis(d: int, seed: int = 0) -> OrthonormalBasis:
    return OrthonormalBasis(random_unitary(d, seed))


@dataclass(frozen=True)
class PartitionSpec:
    """Disjoint blocks of basis indices covering {0, ..., d-1}."""

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        blocks = tuple(tuple(int(i) for i in b) for b in self.blocks)
        if any(len(b) == 0 for b in blocks):
            raise DomainError("partition blocks must be nonempty")
        object.__setattr__(self, "blocks", blocks)

    def validate(self, dim: int) -> None:
        flat = [i for b in self.blocks for i in b]
        if sorted(flat) != list(range(dim)):
            raise DomainError(f"blocks {self.blocks} do not partition range({dim})")

    @classmethod
    def singletons(cls, dim: int) -> "PartitionSpec":
        return cls(tuple((i,) for i in range(dim)))
