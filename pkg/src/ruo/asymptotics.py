"""Asymptotic propagator and long-time behaviour.

With an orthonormal attractor basis ``X_{lam,i}`` the asymptotic map is
``Phi_ass^n(A) = sum lam^n Tr(X^dag A) X``. As a superoperator this is
``V diag(lam^n) V^dag`` where ``V`` holds the vectorized basis as columns.
"""

from dataclasses import dataclass, field
import enum
import math

import numpy as np

from ruo.attractors import CIRCLE_TOL, MAX_ROOT_ORDER, build_attractor_space
from ruo.channel import as_density_matrix, superoperator, trajectory
from ruo.linalg import eig, hs_inner, hs_norm
from ruo.report import CheckReport

CONVERGENCE_THRESHOLD = 1e-8
PERIOD_TOL = 1e-8
R2_MIN = 0.99
#: distances below this are roundoff and excluded from rate fitting
FIT_FLOOR = 1e-13


def attractor_projector(space):
    """Superoperator of ``P(A) = sum Tr(X^dag A) X`` (orthogonal projector)."""
    V, _ = space.columns()
    return V @ V.conj().T


def asymptotic_propagator(space, n):
    """Superoperator of ``Phi_ass^n``; any integer ``n``, ``n = 0`` gives the projector."""
    V, lams = space.columns()
    coeff = np.array([lam ** int(n) for lam in lams], dtype=complex)
    return (V * coeff) @ V.conj().T


def asymptotic_state(space, rho0, n):
    """``rho_inf(n) = sum lam^n Tr(rho0 X^dag) X``."""
    rho0 = as_density_matrix(rho0, space.dim)
    out = np.zeros_like(rho0)
    for lam, X in space.elements():
        out += lam ** int(n) * hs_inner(X, rho0) * X
    return out


@dataclass
class AsymptoticPropagator:
    space: object
    matrix: np.ndarray
    projector: np.ndarray

    @classmethod
    def from_space(cls, space):
        return cls(space, asymptotic_propagator(space, 1), attractor_projector(space))

    def power(self, n):
        return asymptotic_propagator(self.space, n)

    def state(self, rho0, n):
        return asymptotic_state(self.space, rho0, n)


@dataclass
class ConvergenceTrace:
    distances: list  # [(n, ||rho(n) - rho_inf(n)||), ...]
    subdominant_modulus: float
    fitted_rate: float = None
    r_squared: float = None
    threshold: float = CONVERGENCE_THRESHOLD
    final_state: np.ndarray = field(default=None, repr=False)

    @property
    def converged(self):
        return bool(self.distances) and self.distances[-1][1] <= self.threshold

    def first_below(self, threshold=None):
        """Smallest ``n`` from which every recorded distance stays below the threshold."""
        threshold = self.threshold if threshold is None else threshold
        hit = None
        for n, dist in self.distances:
            if dist <= threshold:
                if hit is None:
                    hit = n
            else:
                hit = None
        return hit

    def to_dict(self, full=True):
        out = {
            "steps": self.distances[-1][0] if self.distances else 0,
            "final_distance": self.distances[-1][1] if self.distances else 0.0,
            "threshold": self.threshold,
            "converged": self.converged,
            "converged_from": self.first_below(),
            "subdominant_modulus": self.subdominant_modulus,
            "fitted_rate": self.fitted_rate,
            "r_squared": self.r_squared,
        }
        if full:
            out["distances"] = [[int(n), float(v)] for n, v in self.distances]
        return out


def subdominant_modulus(S, tol=CIRCLE_TOL):
    """Largest eigenvalue modulus strictly inside the unit circle (0 if none)."""
    mods = np.abs(eig(S, vectors=False))
    inside = mods[mods < 1 - tol]
    return float(inside.max()) if inside.size else 0.0


def fit_rate(distances, floor=FIT_FLOOR, r2_min=R2_MIN):
    """Least-squares fit of ``log dist = a + n log r`` over the last two thirds.

    Points below ``floor`` are discarded first. Returns ``(rate, r2)``, with
    ``rate = None`` when fewer than three points remain or ``r2 < r2_min``.
    """
    pts = [(n, v) for n, v in distances if v > floor]
    pts = pts[len(pts) // 3:]
    if len(pts) < 3:
        return None, None
    n = np.array([p[0] for p in pts], dtype=float)
    y = np.log([p[1] for p in pts])
    A = np.vstack([np.ones_like(n), n]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 0.0
    if r2 < r2_min:
        return None, r2
    return float(math.exp(coef[1])), r2


def convergence_trace(e, rho0, n_max, space=None, threshold=CONVERGENCE_THRESHOLD,
                      circle_tol=CIRCLE_TOL):
    """Distances ``||Phi^n(rho0) - rho_inf(n)||`` for ``n = 0..n_max``."""
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    rho0 = as_density_matrix(rho0, e.dim)
    S = superoperator(e)
    if space is None:
        space = build_attractor_space(e, S=S, circle_tol=circle_tol)
    distances = []
    rho = rho0
    for n, rho in enumerate(trajectory(e, rho0, n_max)):
        distances.append((n, hs_norm(rho - asymptotic_state(space, rho0, n))))
    rate, r2 = fit_rate(distances)
    return ConvergenceTrace(
        distances, subdominant_modulus(S, circle_tol), rate, r2, threshold, rho
    )


def operator_distance_trace(S, space, n_max):
    """``||S^n - Phi_ass^n||_HS`` for ``n = 0..n_max``."""
    V, lams = space.columns()
    out = []
    P = np.eye(S.shape[0], dtype=complex)
    for n in range(n_max + 1):
        A = (V * lams ** n) @ V.conj().T
        out.append((n, float(np.linalg.norm(P - A))))
        P = S @ P
    return out


class Regime(str, enum.Enum):
    STATIONARY = "STATIONARY"
    PERIODIC = "PERIODIC"
    APERIODIC = "APERIODIC"


@dataclass
class Classification:
    regime: Regime
    period: int = None
    lambdas: list = field(default_factory=list)

    def __str__(self):
        if self.regime is Regime.PERIODIC:
            return f"PERIODIC(T={self.period})"
        return self.regime.value

    def to_dict(self):
        return {"regime": self.regime.value, "period": self.period, "label": str(self)}


def classify_asymptotics(space, max_order=MAX_ROOT_ORDER, tol=PERIOD_TOL):
    """STATIONARY if only ``lambda = 1``; PERIODIC(T) if all are T-th roots; else APERIODIC."""
    lams = space.lambdas
    if all(abs(lam - 1) <= tol for lam in lams):
        return Classification(Regime.STATIONARY, 1, lams)
    for T in range(2, max_order + 1):
        if all(abs(lam ** T - 1) <= tol for lam in lams):
            return Classification(Regime.PERIODIC, T, lams)
    return Classification(Regime.APERIODIC, None, lams)


# -- checks ------------------------------------------------------------------

def check_projector(space, S, tol=1e-10):
    P = attractor_projector(space)
    idem = float(np.linalg.norm(P @ P - P))
    herm = float(np.linalg.norm(P - P.conj().T))
    comm = float(np.linalg.norm(S @ P - P @ S))
    rank = int(round(np.trace(P).real))
    violations = []
    if idem > tol:
        violations.append(f"||P^2 - P|| = {idem:.3e}")
    if herm > tol:
        violations.append(f"||P - P^dag|| = {herm:.3e}")
    if comm > tol:
        violations.append(f"||[Phi, P]|| = {comm:.3e}")
    if rank != space.total_dim:
        violations.append(f"rank {rank} != attractor dimension {space.total_dim}")
    return CheckReport.from_violations(
        "projector", violations, idempotency=idem, hermiticity=herm,
        commutator=comm, rank=rank,
    )


def check_propagator(space, classification=None, tol=1e-10, period_tol=1e-9):
    """Unitality, commutation with P, closed-form square, semigroup law, periodicity."""
    d = space.dim
    P = attractor_projector(space)
    A1 = asymptotic_propagator(space, 1)
    vec_i = np.eye(d).reshape(-1)
    metrics = {
        "unitality": float(np.linalg.norm(A1 @ vec_i - vec_i)),
        "projector_commutator": float(np.linalg.norm(A1 @ P - P @ A1)),
        "square": float(np.linalg.norm(A1 @ A1 - asymptotic_propagator(space, 2))),
        "inverse": float(np.linalg.norm(asymptotic_propagator(space, -1) @ A1 - P)),
    }
    semigroup = 0.0
    for a in (-2, -1, 0, 1, 2, 3):
        for b in (-1, 0, 1, 2):
            lhs = asymptotic_propagator(space, a) @ asymptotic_propagator(space, b)
            semigroup = max(semigroup, float(np.linalg.norm(lhs - asymptotic_propagator(space, a + b))))
    metrics["semigroup"] = semigroup
    violations = [f"{k} residual {v:.3e}" for k, v in metrics.items() if v > tol]
    if classification is not None and classification.regime is Regime.PERIODIC:
        T = classification.period
        per = max(
            float(np.linalg.norm(asymptotic_propagator(space, n + T) - asymptotic_propagator(space, n)))
            for n in range(3 * T + 1)
        )
        metrics["periodicity"] = per
        if per > period_tol:
            violations.append(f"periodicity residual {per:.3e}")
    return CheckReport.from_violations("propagator", violations, **metrics)
