import json

import numpy as np
import pytest

from kdcoh.coherence import (OptimizerConfig, c_l1, coherence_ncl, grid_oracle_qubit, grid_search_qubit,
                             objective_ncl, objective_nre, optimize_coherence)
from kdcoh.errors import DomainError
from kdcoh.qstate import (BasisParams, DensityOperator, OrthonormalBasis, PartitionSpec, maximally_coherent,
                          maximally_mixed, pure_state, random_density, random_params, random_unitary)
from oracles import expm_chart_ncl

COMP2 = OrthonormalBasis.computational(2)
FAST = OptimizerConfig(starts=8)


def test_l1_of_plus_and_diagonal():
    assert c_l1(pure_state([1, 1]), COMP2) == pytest.approx(1)
    assert c_l1(maximally_mixed(3), OrthonormalBasis.computational(3)) == 0


def test_plus_state_optimum_is_mub():
    rep = optimize_coherence(pure_state([1, 1]), COMP2)
    assert rep.value == pytest.approx(np.sqrt(2) - 1, abs=1e-9)
    assert np.allclose(rep.best_params.angles, [np.pi / 2, np.pi / 2])
    assert rep.value == max(rep.per_start_values)


def test_maximally_coherent_qutrit_reaches_dim_bound():
    rep = optimize_coherence(maximally_coherent(3), OrthonormalBasis.computational(3), cfg=FAST)
    assert rep.value == pytest.approx(np.sqrt(3) - 1, abs=1e-6)


def test_incoherent_state_gives_zero():
    rho = DensityOperator(np.diag([0.5, 0.3, 0.2]))
    assert optimize_coherence(rho, OrthonormalBasis.computational(3), cfg=FAST).value < 1e-12


def test_deterministic_for_fixed_seed():
    rho, a = random_density(3, seed=1), OrthonormalBasis.computational(3)
    r1 = optimize_coherence(rho, a, cfg=OptimizerConfig(starts=4, seed=7))
    r2 = optimize_coherence(rho, a, cfg=OptimizerConfig(starts=4, seed=7))
    assert r1.value == r2.value and np.array_equal(r1.best_params.angles, r2.best_params.angles)


def test_more_starts_never_worse():
    rho, a = random_density(3, seed=11), OrthonormalBasis.computational(3)
    cfg = dict(seed=3, polish_rounds=0, snap=False)
    few = optimize_coherence(rho, a, cfg=OptimizerConfig(starts=3, **cfg))
    many = optimize_coherence(rho, a, cfg=OptimizerConfig(starts=6, **cfg))
    assert many.per_start_values[:3] == few.per_start_values
    assert many.value >= few.value


def test_objectives_at_params():
    p = BasisParams(2, [np.pi / 2, np.pi / 2])
    assert objective_ncl(pure_state([1, 1]), COMP2, p) == pytest.approx(np.sqrt(2) - 1)
    assert objective_nre(pure_state([1, 1]), COMP2, p) == pytest.approx(1)


@pytest.mark.parametrize("seed", range(20))
def test_qubit_optimizer_vs_grid(seed):
    rho = random_density(2, seed=seed)
    opt = optimize_coherence(rho, COMP2, cfg=FAST).value
    grid = grid_oracle_qubit(rho, COMP2, grid_n=500)
    assert abs(opt - grid) <= 1e-3
    assert opt >= grid - 1e-9
    assert opt <= c_l1(rho, COMP2) + 1e-8


@pytest.mark.parametrize("seed", range(10))
def test_qubit_nonreality_equals_l1(seed):
    rho = random_density(2, seed=100 + seed)
    assert optimize_coherence(rho, COMP2, "nre", FAST).value == pytest.approx(c_l1(rho, COMP2), abs=1e-4)


@pytest.mark.parametrize("seed", range(3))
def test_agrees_with_exponential_chart(seed):
    rho, a = random_density(3, seed=seed), OrthonormalBasis.computational(3)
    ours = optimize_coherence(rho, a, cfg=FAST).value
    ref = expm_chart_ncl(rho.matrix, a.columns, starts=6, seed=seed)
    assert ours >= ref - 1e-6


def test_conjugation_invariance():
    rho, a = random_density(2, seed=5), COMP2
    u = random_unitary(2, seed=6)
    from kdcoh.channels import conjugate
    rho_u, a_u = conjugate(rho, a, u)
    assert abs(coherence_ncl(rho, a) - coherence_ncl(rho_u, a_u)) <= 2e-5


def test_grid_search_reports_location():
    v, al, be = grid_search_qubit(pure_state([1, 1]), COMP2, grid_n=401)
    # neither pi/2 lies exactly on this grid; the value is off by second order
    assert v == pytest.approx(np.sqrt(2) - 1, abs=1e-4)
    assert al == pytest.approx(np.pi / 2, abs=0.01)
    assert be % np.pi == pytest.approx(np.pi / 2, abs=0.01)
    with pytest.raises(DomainError):
        grid_search_qubit(random_density(3), OrthonormalBasis.computational(3))


def test_product_mode_rules():
    rho = random_density(4, seed=1, subsystem_dims=(2, 2))
    with pytest.raises(DomainError):
        optimize_coherence(rho, OrthonormalBasis.computational(4), cfg=OptimizerConfig(starts=1, mode="product"))
    prod_a = OrthonormalBasis.computational(4, (2, 2))
    with pytest.raises(DomainError):
        optimize_coherence(rho, prod_a, cfg=OptimizerConfig(starts=1))
    free = optimize_coherence(rho, prod_a, cfg=OptimizerConfig(starts=4, unconstrained=True))
    prod = optimize_coherence(rho, prod_a, cfg=OptimizerConfig(starts=4, mode="product"))
    assert prod.best_params.mode == "product"
    assert prod.best_basis.dim == 4
    assert free.value >= 0 and prod.value >= 0


def test_coarse_projectors_product_state():
    r1, r2 = random_density(2, seed=7), random_density(2, seed=8)
    rho = DensityOperator(np.kron(r1.matrix, r2.matrix), (2, 2))
    part = PartitionSpec(((0, 1), (2, 3)))
    cfg = OptimizerConfig(starts=6, mode="product")
    joint = optimize_coherence(rho, OrthonormalBasis.computational(4, (2, 2)), cfg=cfg, partition=part).value
    assert joint == pytest.approx(coherence_ncl(r1, COMP2), abs=1e-6)


def test_config_validation():
    for bad in (dict(starts=0), dict(max_iterations=0), dict(function_tolerance=0), dict(mode="x")):
        with pytest.raises(DomainError):
            OptimizerConfig(**bad)
    with pytest.raises(DomainError):
        optimize_coherence(random_density(2), COMP2, "neg")


def test_report_serializes():
    rep = optimize_coherence(random_density(2, seed=3), COMP2, cfg=OptimizerConfig(starts=2))
    d = json.loads(json.dumps(rep.to_dict()))
    assert d["value"] == rep.value and len(d["per_start_values"]) == 2
    assert random_params(2, np.random.default_rng(0)).dim == 2
