"""Asymptotic analysis of random unitary operations.

A random unitary operation maps ``rho -> sum_i p_i U_i rho U_i^dagger``.
This package computes its attractor space, the closed-form asymptotic
propagator, and numerically checks the structural properties the
asymptotic theory relies on.
"""

from ruo.errors import (
    AttractorConsistencyError,
    DocumentError,
    EnsembleValidationError,
    NumericError,
    RuoError,
    StateValidationError,
)
from ruo.linalg import (
    eig,
    gram_schmidt_hs,
    hs_inner,
    hs_norm,
    kron,
    nullspace,
    principal_angles,
    unvec,
    vec,
)
from ruo.channel import (
    UnitaryEnsemble,
    apply_adjoint,
    apply_channel,
    as_density_matrix,
    iterate,
    superoperator,
    validate_ensemble,
)
from ruo.attractors import (
    AttractorSpace,
    UnitSpectrum,
    build_attractor_space,
    commutant_basis,
    kernel_basis,
    unit_spectrum,
)
from ruo.asymptotics import (
    AsymptoticPropagator,
    Classification,
    ConvergenceTrace,
    asymptotic_propagator,
    asymptotic_state,
    attractor_projector,
    classify_asymptotics,
    convergence_trace,
)
from ruo.choi import audit, choi_of_asymptotic, partial_trace, reshuffle

__version__ = "0.1.0"
