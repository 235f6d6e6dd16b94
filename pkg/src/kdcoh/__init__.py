"""Kirkwood-Dirac quasiprobability coherence quantifiers, bounds and estimators."""
from .bounds import measurement_uncertainty, purity_bound, verify_bounds
from .coherence import OptimizerConfig, c_l1, coherence_ncl, coherence_nre, optimize_coherence
from .errors import DomainError, SingularOverlapError, StateFileError, UsageError
from .kdq import functionals, kd_distribution, reconstruct_state
from .qstate import BasisParams, DensityOperator, OrthonormalBasis

__version__ = "0.1.0"
