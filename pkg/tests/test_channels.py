import numpy as np
import pytest
from hypothesis import given, strategies as st

from kdcoh.channels import (CIPSpec, apply_kraus, coarse_grain_kd, conjugate, dephase, dephase_mix, phi_cip,
                            phi_cip_dilation, random_incoherent_kraus)
from kdcoh.coherence import c_l1, grid_oracle_qubit
from kdcoh.errors import DomainError
from kdcoh.kdq import functionals, kd_distribution
from kdcoh.qstate import (DensityOperator, OrthonormalBasis, PartitionSpec, pure_state, random_basis,
                          random_density, random_unitary)

seeds = st.integers(0, 2**31 - 1)
COMP2 = OrthonormalBasis.computational(2)
X = np.array([[0, 1], [1, 0]])


def test_dephase_mix_endpoints():
    rho = random_density(3, seed=1)
    a = OrthonormalBasis.computational(3)
    assert np.allclose(dephase_mix(rho, a, 1).matrix, rho.matrix)
    assert np.allclose(dephase_mix(rho, a, 0).matrix, np.diag(np.diag(rho.matrix)))
    assert c_l1(dephase(rho, a), a) < 1e-15
    with pytest.raises(DomainError):
        dephase_mix(rho, a, 1.5)


def test_dephasing_plus_half():
    rho = pure_state([1, 1])
    assert grid_oracle_qubit(dephase_mix(rho, COMP2, 0.5), COMP2) <= grid_oracle_qubit(rho, COMP2)


@given(st.integers(2, 4), seeds)
def test_coarse_graining_never_increases(d, seed):
    rho, a, b = random_density(d, seed=seed), random_basis(d, seed=seed + 1), random_basis(d, seed=seed + 2)
    rng = np.random.default_rng(seed)
    labels = rng.integers(0, 2, d)
    labels[0], labels[-1] = 0, 1
    part = PartitionSpec(tuple(tuple(np.flatnonzero(labels == k)) for k in (0, 1)))
    fine = functionals(kd_distribution(rho, a, b)).ncl
    assert coarse_grain_kd(rho, a, part, b).functionals.ncl <= fine + 1e-12


def test_coarse_graining_edges():
    rho, a, b = random_density(3, seed=2), random_basis(3, seed=3), random_basis(3, seed=4)
    single = coarse_grain_kd(rho, a, PartitionSpec.singletons(3), b)
    kd = kd_distribution(rho, a, b)
    assert np.allclose(single.table, kd.table)
    assert single.functionals.ncl == pytest.approx(functionals(kd).ncl)
    assert coarse_grain_kd(rho, a, PartitionSpec(((0, 1, 2),)), b).functionals.ncl < 1e-14
    with pytest.raises(DomainError):
        coarse_grain_kd(rho, a, PartitionSpec(((0, 1),)), b)


def test_coarse_negative_table():
    from kdcoh.reproduce import ANGLES_NEGATIVE, PSI_NEGATIVE, product_qubit_basis
    rho = pure_state(PSI_NEGATIVE)
    out = coarse_grain_kd(rho, OrthonormalBasis.computational(4), PartitionSpec(((0, 1), (2, 3))),
                          product_qubit_basis(ANGLES_NEGATIVE))
    assert out.functionals.ncl <= 1


def test_conjugate():
    rho, a = random_density(2, seed=0), COMP2
    same, same_a = conjugate(rho, a, np.eye(2))
    assert np.allclose(same.matrix, rho.matrix) and np.allclose(same_a.columns, a.columns)
    with pytest.raises(DomainError):
        conjugate(rho, a, np.array([[1, 1], [0, 1]]))
    u = random_unitary(2, seed=1)
    r2, a2 = conjugate(rho, a, u)
    assert c_l1(r2, a2) == pytest.approx(c_l1(rho, a))


def test_cip_identity_and_swap():
    rho = random_density(2, seed=3)
    assert np.allclose(phi_cip(rho, CIPSpec([1.0], [(0, 1)])).matrix, rho.matrix)
    assert np.allclose(phi_cip(rho, CIPSpec([1.0], [(1, 0)])).matrix, X @ rho.matrix @ X)


@given(st.integers(2, 4), seeds)
def test_cip_kraus_equals_dilation(d, seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    probs = rng.dirichlet(np.ones(n))
    perms = [tuple(rng.permutation(d)) for _ in range(n)]
    spec = CIPSpec(probs, perms)
    rho = random_density(d, seed=seed)
    assert np.max(np.abs(phi_cip(rho, spec).matrix - phi_cip_dilation(rho, spec).matrix)) <= 1e-12
    diag = DensityOperator(np.diag(rng.dirichlet(np.ones(d))))
    out = phi_cip(diag, spec).matrix
    assert np.abs(out - np.diag(np.diag(out))).sum() <= 1e-12


def test_cip_validation():
    with pytest.raises(DomainError):
        CIPSpec([0.5, 0.6], [(0, 1), (1, 0)])
    with pytest.raises(DomainError):
        CIPSpec([1.0], [(0, 0)])
    with pytest.raises(DomainError):
        CIPSpec([0.5, 0.5], [(0, 1)])
    with pytest.raises(DomainError):
        phi_cip(random_density(3), CIPSpec([1.0], [(1, 0)]))


def test_random_incoherent_kraus_is_trace_preserving_and_incoherent():
    ks = random_incoherent_kraus(3, 4, seed=5)
    assert np.allclose(sum(k.conj().T @ k for k in ks), np.eye(3))
    out = apply_kraus(DensityOperator(np.diag([0.2, 0.3, 0.5])), ks).matrix
    assert np.allclose(out, np.diag(np.diag(out)))
