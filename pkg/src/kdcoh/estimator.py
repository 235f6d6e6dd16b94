"""Shot-noise simulation of direct KD-entry estimation and the SPSA variational loop.

Entries are sampled from an abstract unbiased oracle: the exact value plus
independent Gaussian noise of width ``1/(2 sqrt(N))`` on each of the real and
imaginary parts, the worst-case binomial width for a +-1 observable.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .coherence import OptimizerConfig, _objective, _search_dims, optimize_coherence
from .errors import DomainError
from .kdq import kd_table
from .qstate import (BasisParams, DensityOperator, OrthonormalBasis, basis_from_params,
                     random_params, wrap_params)

# stream tag for SPSA perturbation draws, distinct from any (evaluation, a, b) key
_SPSA_STREAM = 2**31 - 1


@dataclass(frozen=True)
class SamplingModel:
    """Shot budget per KD entry; ``shots_per_entry=None`` disables noise."""

    shots_per_entry: int | None = 100_000
    noise_kind: Literal["gaussian_surrogate"] = "gaussian_surrogate"
    seed: int = 0

    def __post_init__(self):
        if self.shots_per_entry is not None and self.shots_per_entry < 1:
            raise DomainError("shots_per_entry must be >= 1")
        if self.noise_kind != "gaussian_surrogate":
            raise DomainError(f"unknown noise model {self.noise_kind!r}")

    @property
    def sigma(self) -> float:
        if self.shots_per_entry is None:
            return 0.0
        return 1.0 / (2.0 * np.sqrt(self.shots_per_entry))


def _noise(model: SamplingModel, evaluation: int, a: int, b: int) -> complex:
    if model.shots_per_entry is None:
        return 0j
    rng = np.random.default_rng([model.seed, evaluation, a, b])
    re, im = rng.normal(0.0, model.sigma, size=2)
    return complex(re, im)


def sample_kd_entry(rho: DensityOperator, a_basis: OrthonormalBasis, b_basis: OrthonormalBasis,
                    a: int, b: int, model: SamplingModel, evaluation: int = 0) -> complex:
    """Noisy estimate of ``q[a, b]``; deterministic in (seed, evaluation, a, b)."""
    d = rho.dim
    if a_basis.dim != d or b_basis.dim != d:
        raise DomainError("dimension mismatch between state and bases")
    if not (0 <= a < d and 0 <= b < d):
        raise DomainError(f"entry ({a}, {b}) out of range for dim {d}")
    va, vb = a_basis.columns[:, a], b_basis.columns[:, b]
    exact = np.conj(va.conj() @ vb) * (va.conj() @ rho.matrix @ vb)
    return complex(exact) + _noise(model, evaluation, a, b)


def sample_kd_table(rho: DensityOperator, a_basis: OrthonormalBasis, b_basis: OrthonormalBasis,
                    model: SamplingModel, evaluation: int = 0) -> np.ndarray:
    q = kd_table(rho.matrix, a_basis.columns, b_basis.columns)
    if model.shots_per_entry is None:
        return q
    d = rho.dim
    noise = np.array([[_noise(model, evaluation, a, b) for b in range(d)] for a in range(d)])
    return q + noise


def noisy_objective(rho: DensityOperator, a_basis: OrthonormalBasis, params: BasisParams,
                    model: SamplingModel, evaluation: int = 0) -> float:
    """``sum |q_hat| - 1`` clipped at 0.

    Positively biased near zero entries (the mean of a folded Gaussian); the
    bias is at most ``d^2 sqrt(2) sigma`` and is reported, not corrected.
    """
    q = sample_kd_table(rho, a_basis, basis_from_params(params), model, evaluation)
    return max(0.0, float(np.abs(q).sum() - 1))


@dataclass(frozen=True)
class SPSAConfig:
    iterations: int = 300
    a: float = 0.2
    c: float = 0.1
    A_stab: float = 30.0
    alpha: float = 0.602
    gamma: float = 0.101

    def __post_init__(self):
        if self.iterations < 1:
            raise DomainError("iterations must be >= 1")
        if self.a <= 0 or self.c <= 0:
            raise DomainError("SPSA gains must be positive")


@dataclass(frozen=True, eq=False)
class EstimationTrace:
    iterations: list[tuple[np.ndarray, float]]
    final_value: float
    final_params: BasisParams
    exact_reference: float | None
    total_shots: int
    bias_bound: float
    evaluations: int = 0
    exact_at_final: float = field(default=float("nan"))

    def to_dict(self) -> dict:
        return {
            "final_value": self.final_value,
            "exact_reference": self.exact_reference,
            "exact_at_final": self.exact_at_final,
            "total_shots": self.total_shots,
            "evaluations": self.evaluations,
            "bias_bound": self.bias_bound,
            "final_params": self.final_params.angles.tolist(),
            "values": [v for _, v in self.iterations],
        }


def variational_estimate(rho: DensityOperator, a_basis: OrthonormalBasis,
                         cfg: OptimizerConfig = OptimizerConfig(),
                         model: SamplingModel = SamplingModel(),
                         spsa: SPSAConfig = SPSAConfig(),
                         exact_reference: bool = True) -> EstimationTrace:
    """Maximize the noisy nonclassicality by SPSA over the basis chart.

    Every iterate is accepted; the trace value for iteration k is a fresh noisy
    evaluation at the updated parameters. ``cfg`` supplies the chart mode and
    seed, and (when ``exact_reference``) the noiseless optimizer settings.
    """
    if rho.dim != a_basis.dim:
        raise DomainError(f"dimension mismatch: state {rho.dim} vs basis {a_basis.dim}")
    dims = _search_dims(rho, a_basis, cfg)
    rng = np.random.default_rng([cfg.seed, _SPSA_STREAM])
    x = random_params(rho.dim, rng, dims).angles.copy()
    evaluation = 0

    def f(angles):
        nonlocal evaluation
        v = noisy_objective(rho, a_basis, BasisParams(rho.dim, angles, dims), model, evaluation)
        evaluation += 1
        return v

    trace = []
    for k in range(spsa.iterations):
        ak = spsa.a / (k + 1 + spsa.A_stab) ** spsa.alpha
        ck = spsa.c / (k + 1) ** spsa.gamma
        delta = rng.choice([-1.0, 1.0], size=x.size)
        g = (f(x + ck * delta) - f(x - ck * delta)) / (2 * ck) * delta
        x = x + ak * g
        trace.append((x.copy(), f(x)))

    final = wrap_params(BasisParams(rho.dim, x, dims))
    exact_fn = _objective(rho, a_basis, "ncl", final)
    ref = optimize_coherence(rho, a_basis, "ncl", cfg).value if exact_reference else None
    d2 = rho.dim ** 2
    return EstimationTrace(
        iterations=trace,
        final_value=trace[-1][1],
        final_params=final,
        exact_reference=ref,
        total_shots=(model.shots_per_entry or 0) * d2 * evaluation,
        bias_bound=d2 * np.sqrt(2) * model.sigma,
        evaluations=evaluation,
        exact_at_final=max(0.0, exact_fn(final.angles)),
    )
