"""Dynamical (Choi) matrices by reshuffling superoperators, and their audit.

A superoperator ``S[(m, mu), (n, nu)]`` reshuffles to
``D[(m, n), (mu, nu)] = S[(m, mu), (n, nu)]``. Reading ``D`` as an operator on
``H_A (x) H_B`` (Latin indices on A, Greek on B):

* ``Tr_A D = I``  <=>  the map is trace preserving
* ``Tr_B D = I``  <=>  the map is unital
* ``D >= 0``      <=>  the map is completely positive
"""

from dataclasses import dataclass
import math

import numpy as np

from ruo.asymptotics import asymptotic_propagator
from ruo.errors import ShapeError
from ruo.report import CheckReport

HERMITICITY_TOL = 1e-10
PARTIAL_TRACE_TOL = 1e-9
POSITIVITY_TOL = 1e-9


def _split_dim(D):
    D = np.asarray(D)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {D.shape}")
    d = math.isqrt(D.shape[0])
    if d * d != D.shape[0]:
        raise ShapeError(f"size {D.shape[0]} is not a square of an integer")
    return D, d


def reshuffle(S):
    """Exact index permutation ``(m mu),(n nu) -> (m n),(mu nu)``; an involution."""
    S, d = _split_dim(S)
    return S.reshape(d, d, d, d).transpose(0, 2, 1, 3).reshape(d * d, d * d).copy()


def partial_trace(D, which):
    """Trace out subsystem ``"A"`` (first factor) or ``"B"`` (second factor)."""
    D, d = _split_dim(D)
    T = D.reshape(d, d, d, d)  # [a, b, a', b']
    if which == "A":
        return np.einsum("abac->bc", T)
    if which == "B":
        return np.einsum("abcb->ac", T)
    raise ValueError(f"subsystem must be 'A' or 'B', got {which!r}")


@dataclass
class ChoiAudit:
    hermiticity: float
    trace_a_defect: float
    trace_b_defect: float
    min_eigenvalue: float

    @property
    def hermitian(self):
        return self.hermiticity <= HERMITICITY_TOL

    @property
    def trace_preserving(self):
        return self.trace_a_defect <= PARTIAL_TRACE_TOL

    @property
    def unital(self):
        return self.trace_b_defect <= PARTIAL_TRACE_TOL

    @property
    def cp(self):
        return self.min_eigenvalue >= -POSITIVITY_TOL

    @property
    def passed(self):
        return self.hermitian and self.trace_preserving and self.unital and self.cp

    def to_dict(self):
        return {
            "hermiticity_residual": self.hermiticity,
            "trace_A_defect": self.trace_a_defect,
            "trace_B_defect": self.trace_b_defect,
            "min_eigenvalue": self.min_eigenvalue,
            "hermitian": self.hermitian,
            "trace_preserving": self.trace_preserving,
            "unital": self.unital,
            "completely_positive": self.cp,
            "passed": self.passed,
        }


def audit(D):
    """Measure the four dynamical-matrix properties. Never modifies ``D``."""
    D, d = _split_dim(D)
    eye = np.eye(d)
    herm_part = (D + D.conj().T) / 2
    return ChoiAudit(
        hermiticity=float(np.linalg.norm(D - D.conj().T)),
        trace_a_defect=float(np.linalg.norm(partial_trace(D, "A") - eye)),
        trace_b_defect=float(np.linalg.norm(partial_trace(D, "B") - eye)),
        min_eigenvalue=float(np.linalg.eigvalsh(herm_part)[0]),
    )


def choi_of_asymptotic(space, n):
    """``sum lam^n X (x) conj(X)``, assembled directly from the attractor basis."""
    d = space.dim
    D = np.zeros((d * d, d * d), dtype=complex)
    for lam, X in space.elements():
        D += lam ** int(n) * np.kron(X, X.conj())
    return D


def transpose_superoperator(d):
    """Superoperator of ``A -> A^T``; not completely positive for ``d >= 2``."""
    S = np.zeros((d * d, d * d))
    for m in range(d):
        for mu in range(d):
            S[m * d + mu, mu * d + m] = 1.0
    return S


def positivity_functional(space, A):
    """``sum lam Tr(A^dag X A X^dag)``; nonnegative for every ``A`` when ``Phi_ass`` is CP."""
    return complex(sum(lam * np.trace(A.conj().T @ X @ A @ X.conj().T)
                       for lam, X in space.elements()))


def check_choi(label, D):
    a = audit(D)
    violations = []
    if not a.hermitian:
        violations.append(f"hermiticity residual {a.hermiticity:.3e}")
    if not a.trace_preserving:
        violations.append(f"||Tr_A D - I|| = {a.trace_a_defect:.3e}")
    if not a.unital:
        violations.append(f"||Tr_B D - I|| = {a.trace_b_defect:.3e}")
    if not a.cp:
        violations.append(f"min eigenvalue {a.min_eigenvalue:.3e}")
    return CheckReport.from_violations(f"choi[{label}]", violations, **a.to_dict())


def check_dual_route(space, ns=(-2, -1, 0, 1, 2), tol=1e-10):
    worst = max(
        float(np.linalg.norm(choi_of_asymptotic(space, n) - reshuffle(asymptotic_propagator(space, n))))
        for n in ns
    )
    violations = [] if worst <= tol else [f"dual-route mismatch {worst:.3e}"]
    return CheckReport.from_violations("choi_dual_route", violations, max_mismatch=worst)


def check_positivity_inequality(space, samples, tol=POSITIVITY_TOL):
    vals = [positivity_functional(space, A) for A in samples]
    lo = min(v.real for v in vals)
    imag = max(abs(v.imag) for v in vals)
    violations = []
    if lo < -tol:
        violations.append(f"functional minimum {lo:.3e}")
    return CheckReport.from_violations(
        "positivity_inequality", violations, minimum=lo, max_imaginary=imag,
        samples=len(vals),
    )
