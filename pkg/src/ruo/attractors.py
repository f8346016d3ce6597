"""Unit-circle spectrum and attractor space of a random unitary operation.

For ``|lambda| = 1`` the eigenspace ``Ker(Phi - lambda)`` coincides with the
solution set of ``U_i X = lambda X U_i`` for every member ``U_i``. The
commutation system is the primary construction; the plain kernel of the
superoperator is solved independently and the two spans must agree.
"""

from dataclasses import dataclass, field
from fractions import Fraction
import math

import numpy as np

from ruo.channel import superoperator
from ruo.errors import AttractorConsistencyError
from ruo.linalg import (
    eig,
    fix_phase,
    gram_schmidt_hs,
    hs_norm,
    matrix_rank,
    max_angle,
    nullspace,
    orthonormal_columns,
    unvec,
)
from ruo.report import CheckReport

CIRCLE_TOL = 1e-9
CLUSTER_RADIUS = 1e-8
#: relative singular-value threshold for eigenspace solves
NULL_TOL = 1e-10
MAX_ROOT_ORDER = 24
CONSISTENCY_TOL = 1e-6


def snap_root(lam, max_order=MAX_ROOT_ORDER, tol=CLUSTER_RADIUS):
    """Smallest-order root of unity within ``tol`` of ``lam``, as a phase fraction.

    Returns ``Fraction(p, q)`` meaning ``exp(2 pi i p/q)``, or ``None``.
    """
    phase = math.atan2(lam.imag, lam.real) / (2 * math.pi) % 1.0
    for q in range(1, max_order + 1):
        p = round(phase * q) % q
        if abs(lam - np.exp(2j * math.pi * p / q)) <= tol:
            return Fraction(p, q)
    return None


@dataclass
class UnitSpectrum:
    values: list
    multiplicities: list
    raw: list
    roots: list = field(default_factory=list)

    def __len__(self):
        return len(self.values)

    def to_dict(self):
        return {
            "eigenvalues": [
                {
                    "lambda": complex(v),
                    "multiplicity": int(k),
                    "cluster_size": len(r),
                    "root_of_unity": None if q is None else f"{q.numerator}/{q.denominator}",
                }
                for v, k, r, q in zip(self.values, self.multiplicities, self.raw, self.roots)
            ]
        }


def _cluster(eigs, radius):
    """Single-linkage clusters of eigenvalues (input sorted by phase)."""
    clusters = []
    for z in eigs:
        for c in clusters:
            if min(abs(z - w) for w in c) <= radius:
                c.append(z)
                break
        else:
            clusters.append([z])
    return clusters


def _phase(z):
    ph = math.atan2(z.imag, z.real) % (2 * math.pi)
    return 0.0 if ph > 2 * math.pi - 1e-12 else ph


def unit_spectrum(S, tol=CIRCLE_TOL, *, radius=CLUSTER_RADIUS, null_tol=NULL_TOL,
                  max_order=MAX_ROOT_ORDER):
    """Eigenvalues of ``S`` on the unit circle, clustered and re-projected.

    ``tol`` is the absolute unit-circle tolerance ``1 - |lambda| <= tol``.
    Multiplicities are geometric, from the null space of ``S - lambda I``.
    """
    w = eig(S, vectors=False)
    near = [complex(z) for z in w if abs(z) >= 1 - tol]
    values, mults, raw, roots = [], [], [], []
    eye = np.eye(S.shape[0])
    for c in _cluster(near, radius):
        centroid = sum(c) / len(c)
        lam = centroid / abs(centroid)
        values.append(lam)
        raw.append(c)
        mults.append(len(nullspace(S - lam * eye, null_tol)))
        roots.append(snap_root(lam, max_order))
    order = sorted(range(len(values)), key=lambda k: _phase(values[k]))
    return UnitSpectrum(
        [values[k] for k in order],
        [mults[k] for k in order],
        [raw[k] for k in order],
        [roots[k] for k in order],
    )


def commutation_system(e, lam):
    """Stack ``U_i (x) I - lambda I (x) U_i^T`` for all members."""
    d = e.dim
    eye = np.eye(d)
    return np.vstack([np.kron(U, eye) - lam * np.kron(eye, U.T) for U in e.unitaries])


def commutant_basis(e, lam, null_tol=NULL_TOL):
    """Orthonormal basis of ``{X : U_i X = lambda X U_i for all i}``."""
    return [unvec(v) for v in nullspace(commutation_system(e, lam), null_tol)]


def kernel_basis(S, lam, null_tol=NULL_TOL):
    """Orthonormal basis of ``Ker(S - lambda I)`` as matrices."""
    return [unvec(v) for v in nullspace(S - lam * np.eye(S.shape[0]), null_tol)]


@dataclass
class AttractorSpace:
    """Orthonormal attractor basis, grouped by unit-circle eigenvalue."""

    dim: int
    blocks: list  # [(lambda, [X, ...]), ...] ordered by phase
    spectrum: UnitSpectrum = None

    @property
    def lambdas(self):
        return [lam for lam, _ in self.blocks]

    @property
    def dims(self):
        return [len(basis) for _, basis in self.blocks]

    @property
    def total_dim(self):
        return sum(self.dims)

    def elements(self):
        """Flat list of ``(lambda, X)``."""
        return [(lam, X) for lam, basis in self.blocks for X in basis]

    def block(self, lam, tol=CLUSTER_RADIUS):
        for mu, basis in self.blocks:
            if abs(mu - lam) <= tol:
                return basis
        return None

    def columns(self):
        """``(V, lambdas)``: vectorized basis as columns and per-column eigenvalue."""
        elems = self.elements()
        V = orthonormal_columns([X for _, X in elems])
        return V, np.array([lam for lam, _ in elems], dtype=complex)

    def to_dict(self, full=False):
        out = {
            "dim": self.dim,
            "total_dimension": self.total_dim,
            "blocks": [],
        }
        for lam, basis in self.blocks:
            entry = {"lambda": complex(lam), "dimension": len(basis)}
            if full:
                entry["basis"] = [X for X in basis]
            out["blocks"].append(entry)
        return out


def build_attractor_space(e, *, circle_tol=CIRCLE_TOL, null_tol=NULL_TOL,
                          consistency_tol=CONSISTENCY_TOL, S=None):
    """Attractor space of ``e`` with a kernel-vs-commutant cross-check per eigenvalue."""
    if S is None:
        S = superoperator(e)
    spec = unit_spectrum(S, circle_tol, null_tol=null_tol)
    raw_blocks = []
    for lam in spec.values:
        cb = commutant_basis(e, lam, null_tol)
        kb = kernel_basis(S, lam, null_tol)
        if not cb or len(cb) != len(kb):
            raise AttractorConsistencyError(
                f"eigenvalue {lam:.12g}: commutant dimension {len(cb)} "
                f"but kernel dimension {len(kb)}"
            )
        angle = max_angle(cb, kb)
        if angle > consistency_tol:
            raise AttractorConsistencyError(
                f"eigenvalue {lam:.12g}: commutant and kernel spans differ "
                f"(max principal angle {angle:.3e})"
            )
        raw_blocks.append((lam, cb))

    flat = [X for _, basis in raw_blocks for X in basis]
    ortho = gram_schmidt_hs(flat)
    if len(ortho) != len(flat):
        raise AttractorConsistencyError(
            f"attractor basis lost rank on global orthonormalization "
            f"({len(flat)} -> {len(ortho)})"
        )
    blocks, k = [], 0
    for lam, basis in raw_blocks:
        blocks.append((lam, [fix_phase(X) for X in ortho[k:k + len(basis)]]))
        k += len(basis)
    return AttractorSpace(e.dim, blocks, spec)


# -- checks ------------------------------------------------------------------

def check_structure(e, space, S=None, tol=1e-7, null_tol=NULL_TOL):
    """Principal angles between kernel and commutant spans for every eigenvalue."""
    if S is None:
        S = superoperator(e)
    angles, violations = {}, []
    for lam, _ in space.blocks:
        cb = commutant_basis(e, lam, null_tol)
        kb = kernel_basis(S, lam, null_tol)
        a = max_angle(cb, kb)
        angles[_label(lam)] = a
        if len(cb) != len(kb) or a > tol:
            violations.append(
                f"lambda={_label(lam)}: dims {len(cb)}/{len(kb)}, angle {a:.3e}"
            )
    return CheckReport.from_violations("structure", violations, max_angles=angles)


def check_membership(e, space, tol=1e-8):
    """``max_i ||U_i X - lambda X U_i||`` over the basis."""
    worst = 0.0
    for lam, X in space.elements():
        for U in e.unitaries:
            worst = max(worst, hs_norm(U @ X - lam * X @ U))
    violations = [] if worst <= tol else [f"max commutation residual {worst:.3e}"]
    return CheckReport.from_violations("commutation", violations, max_residual=worst)


def check_orthogonality(space, tol=1e-10):
    V, _ = space.columns()
    if V.size == 0:
        return CheckReport.from_violations("orthogonality", ["empty attractor space"])
    G = V.conj().T @ V
    dev = float(np.max(np.abs(G - np.eye(G.shape[0]))))
    violations = [] if dev <= tol else [f"max |Gram - I| = {dev:.3e}"]
    return CheckReport.from_violations("orthogonality", violations, max_gram_deviation=dev)


def check_trace_property(space, tol=1e-8):
    """Every attractor with ``lambda != 1`` must be traceless."""
    violations, worst = [], 0.0
    for k, (lam, X) in enumerate(space.elements()):
        if abs(lam - 1) <= CLUSTER_RADIUS:
            continue
        t = abs(np.trace(X))
        worst = max(worst, t)
        if t > tol:
            violations.append(f"element {k} (lambda={_label(lam)}): |Tr X| = {t:.3e}")
    return CheckReport.from_violations("trace", violations, max_abs_trace=worst)


def check_unitality_resolution(space, tol=1e-8):
    """``sum_i Tr(X_{1,i}^dag) X_{1,i} = I``."""
    d = space.dim
    acc = np.zeros((d, d), dtype=complex)
    for X in space.block(1.0) or []:
        acc += np.conj(np.trace(X)) * X
    dev = hs_norm(acc - np.eye(d))
    violations = [] if dev <= tol else [f"||sum Tr(X^dag) X - I|| = {dev:.3e}"]
    return CheckReport.from_violations("unitality_resolution", violations, residual=dev)


def check_diagonalizability(S, spec, tol=NULL_TOL):
    """``rank(S - lambda) == rank((S - lambda)^2)`` for each unit-circle eigenvalue."""
    eye = np.eye(S.shape[0])
    ranks, violations = {}, []
    for lam in spec.values:
        M = S - lam * eye
        r1 = matrix_rank(M, tol)
        r2 = matrix_rank(M @ M, tol)
        ranks[_label(lam)] = [r1, r2]
        if r1 != r2:
            violations.append(f"lambda={_label(lam)}: rank {r1} vs squared rank {r2}")
    return CheckReport.from_violations("diagonalizability", violations, ranks=ranks)


def _span_residual(M, V):
    """Norm of the component of vectorized ``M`` outside the column span of ``V``."""
    m = M.reshape(-1)
    if V.size:
        m = m - V @ (V.conj().T @ m)
    return float(np.linalg.norm(m))


def check_closure(space, tol=1e-8):
    """Products land in the ``lambda1*lambda2`` block (or vanish); adjoints in ``conj(lambda)``."""
    cols = {}
    for lam, basis in space.blocks:
        cols[_label(lam)] = orthonormal_columns(basis)

    def target(mu):
        for lam, _ in space.blocks:
            if abs(lam - mu) <= CLUSTER_RADIUS * 10:
                return cols[_label(lam)]
        return np.zeros((space.dim ** 2, 0), dtype=complex)

    elems = space.elements()
    worst_prod, worst_adj, violations = 0.0, 0.0, []
    for i, (l1, X1) in enumerate(elems):
        r = _span_residual(X1.conj().T, target(np.conj(l1)))
        worst_adj = max(worst_adj, r)
        if r > tol:
            violations.append(f"adjoint of element {i}: residual {r:.3e}")
        for j, (l2, X2) in enumerate(elems):
            r = _span_residual(X1 @ X2, target(l1 * l2))
            worst_prod = max(worst_prod, r)
            if r > tol:
                violations.append(f"product ({i},{j}): residual {r:.3e}")
    return CheckReport.from_violations(
        "closure", violations[:20], max_product_residual=worst_prod,
        max_adjoint_residual=worst_adj, violation_count=len(violations),
    )


def _label(lam):
    lam = complex(lam)
    re_, im_ = round(lam.real, 9) + 0.0, round(lam.imag, 9) + 0.0
    return f"{re_:.9g}{im_:+.9g}j"
