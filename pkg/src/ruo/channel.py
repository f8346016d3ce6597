"""Random unitary operations: validation, application, superoperator form."""

from dataclasses import dataclass, field
import math

import numpy as np

from ruo.errors import EnsembleValidationError, ShapeError, StateValidationError
from ruo.linalg import hs_norm

PROB_SUM_TOL = 1e-12
UNITARITY_TOL = 1e-10
STATE_TOL = 1e-10
MAX_DIM = 64


@dataclass(frozen=True, eq=False)
class UnitaryEnsemble:
    """Probabilities ``p`` (shape ``(m,)``) and unitaries ``U`` (shape ``(m, d, d)``).

    Build through :func:`validate_ensemble`; the constructor does not check
    invariants.
    """

    probabilities: np.ndarray
    unitaries: np.ndarray
    name: str = field(default="")

    @property
    def dim(self):
        return self.unitaries.shape[1]

    @property
    def m(self):
        return self.unitaries.shape[0]

    def __iter__(self):
        return iter(zip(self.probabilities, self.unitaries))

    def with_probabilities(self, probabilities):
        return validate_ensemble(list(zip(probabilities, self.unitaries)), name=self.name)


def validate_ensemble(raw, *, name="", max_dim=MAX_DIM):
    """Check and freeze an ensemble given as ``(probability, unitary)`` pairs.

    Every violated invariant is collected before raising
    :class:`EnsembleValidationError`. Probabilities are never renormalized.
    """
    items = list(raw)
    violations = []
    if not items:
        raise EnsembleValidationError(["ensemble has no members"])
    probs = []
    mats = []
    for k, item in enumerate(items):
        try:
            p, U = item
        except (TypeError, ValueError):
            violations.append(f"member {k}: expected a (probability, matrix) pair")
            continue
        try:
            p = float(p)
        except (TypeError, ValueError):
            violations.append(f"member {k}: probability is not a real number")
            p = math.nan
        U = np.asarray(U, dtype=complex)
        probs.append(p)
        mats.append(U)
        if not math.isfinite(p) or p <= 0:
            violations.append(f"member {k}: probability {p!r} must be > 0")
        elif p > 1:
            violations.append(f"member {k}: probability {p!r} exceeds 1")
        if U.ndim != 2 or U.shape[0] != U.shape[1]:
            violations.append(f"member {k}: matrix is not square (shape {U.shape})")
        elif not np.all(np.isfinite(U)):
            violations.append(f"member {k}: matrix has non-finite entries")
    if violations:
        raise EnsembleValidationError(violations)

    dims = {U.shape[0] for U in mats}
    if len(dims) > 1:
        violations.append(f"dimension mismatch among members: {sorted(dims)}")
        raise EnsembleValidationError(violations)
    d = dims.pop()
    if max_dim is not None and d > max_dim:
        violations.append(f"dimension {d} exceeds limit {max_dim}")
    total = math.fsum(probs)
    if abs(total - 1.0) > PROB_SUM_TOL:
        violations.append(f"probabilities sum to {total:.12g}, not 1")
    eye = np.eye(d)
    for k, U in enumerate(mats):
        defect = hs_norm(U.conj().T @ U - eye)
        if defect > UNITARITY_TOL * math.sqrt(d):
            violations.append(
                f"member {k}: matrix is not unitary (||U^dag U - I|| = {defect:.3e})"
            )
    if violations:
        raise EnsembleValidationError(violations)
    P = np.array(probs, dtype=float)
    Us = np.stack(mats)
    P.setflags(write=False)
    Us.setflags(write=False)
    return UnitaryEnsemble(P, Us, name)


def _check_operand(e, A):
    A = np.asarray(A)
    if A.shape != (e.dim, e.dim):
        raise ShapeError(f"operand shape {A.shape} does not match ensemble dim {e.dim}")
    return A


def apply_channel(e, A):
    """``sum_i p_i U_i A U_i^dagger``."""
    A = _check_operand(e, A)
    U = e.unitaries
    terms = U @ A @ U.conj().transpose(0, 2, 1)
    return np.tensordot(e.probabilities, terms, axes=1)


def apply_adjoint(e, A):
    """``sum_i p_i U_i^dagger A U_i``, the Hilbert-Schmidt adjoint."""
    A = _check_operand(e, A)
    U = e.unitaries
    terms = U.conj().transpose(0, 2, 1) @ A @ U
    return np.tensordot(e.probabilities, terms, axes=1)


def superoperator(e):
    """``sum_i p_i U_i (x) conj(U_i)``, acting on row-major vectorized operators."""
    d = e.dim
    S = np.zeros((d * d, d * d), dtype=complex)
    for p, U in e:
        S += p * np.kron(U, U.conj())
    return S


def as_density_matrix(rho, dim=None, tol=STATE_TOL):
    """Validate a density matrix and return it as a complex array."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise StateValidationError([f"not a square matrix (shape {rho.shape})"])
    if dim is not None and rho.shape[0] != dim:
        raise StateValidationError([f"dimension {rho.shape[0]} does not match {dim}"])
    if not np.all(np.isfinite(rho)):
        raise StateValidationError(["non-finite entries"])
    violations = []
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    if herm > tol:
        violations.append(f"not hermitian (max |rho - rho^dag| = {herm:.3e})")
    tr = np.trace(rho)
    if abs(tr - 1) > tol:
        violations.append(f"trace is {tr.real:.12g}{tr.imag:+.3g}j, not 1")
    if not violations:
        lo = float(np.linalg.eigvalsh((rho + rho.conj().T) / 2)[0])
        if lo < -tol:
            violations.append(f"not positive (min eigenvalue {lo:.3e})")
    if violations:
        raise StateValidationError(violations)
    return rho


def trajectory(e, rho0, n):
    """Yield ``rho(0), rho(1), ..., rho(n)`` by repeated application."""
    if n < 0:
        raise ValueError(f"number of steps must be nonnegative, got {n}")
    rho = _check_operand(e, rho0).astype(complex)
    yield rho
    for _ in range(n):
        rho = apply_channel(e, rho)
        yield rho


def iterate(e, rho0, n):
    """``Phi^n(rho0)`` by ``n`` applications of the channel."""
    rho0 = as_density_matrix(rho0, e.dim)
    for rho in trajectory(e, rho0, n):
        pass
    return rho


def contraction_defects(e, samples):
    """``||Phi(A)|| - ||A||`` for each sample operator (nonpositive for a valid RUO)."""
    return np.array([hs_norm(apply_channel(e, A)) - hs_norm(A) for A in samples])
