"""Full verification run for one ensemble.

Determines the unit-circle spectrum, builds the attractor basis, evaluates the
asymptotic propagator, and runs every structural check plus the cross-module
oracles (iteration vs closed form, kernel vs commutant, Choi dual route).
"""

import math

import numpy as np

from ruo import asymptotics, attractors, choi
from ruo.attractors import CIRCLE_TOL, MAX_ROOT_ORDER, NULL_TOL, build_attractor_space
from ruo.channel import (
    apply_adjoint,
    apply_channel,
    contraction_defects,
    iterate,
    superoperator,
)
from ruo.linalg import hs_inner, hs_norm, unvec, vec
from ruo.report import PASS, SKIPPED, CheckReport
from ruo.sampling import random_density, random_matrix, rng_from

SEED = 20061
CLOSURE_MAX_DIM = 256
OPERATOR_TRACE_MAX_D = 16
MAX_STEPS = 10000


def _skip(name, reason):
    return CheckReport(name, SKIPPED, {"reason": reason})


def steps_to_converge(mu, d, threshold):
    """Steps after which ``d * mu^n`` falls below ``threshold / 10``."""
    if mu <= 0.0:
        return 1
    if threshold <= 0.0:
        return math.inf
    return int(math.ceil(math.log(threshold / (10.0 * d)) / math.log(mu))) + 1


def contraction_checks(e, S, rng):
    mods = np.abs(np.linalg.eigvals(S))
    top = float(mods.max())
    spec = CheckReport.from_violations(
        "eigenvalue_moduli", [] if top <= 1 + 1e-10 else [f"max |lambda| = {top:.3e}"],
        max_modulus=top,
    )
    samples = [random_matrix(e.dim, rng) for _ in range(100)]
    defects = contraction_defects(e, samples)
    worst = float(defects.max())
    tr = max(abs(np.trace(apply_channel(e, A)) - np.trace(A)) for A in samples)
    violations = []
    if worst > 1e-12:
        violations.append(f"||Phi(A)|| exceeds ||A|| by {worst:.3e}")
    if tr > 1e-12 * max(1, e.dim):
        violations.append(f"trace defect {tr:.3e}")
    contraction = CheckReport.from_violations(
        "contraction", violations, max_norm_excess=worst, max_trace_defect=float(tr),
    )
    return [spec, contraction]


def channel_checks(e, S, rng):
    worst_adj = 0.0
    worst_act = 0.0
    for _ in range(20):
        A = random_matrix(e.dim, rng)
        B = random_matrix(e.dim, rng)
        lhs = hs_inner(B, apply_channel(e, A))
        rhs = hs_inner(apply_adjoint(e, B), A)
        worst_adj = max(worst_adj, abs(lhs - rhs) / (hs_norm(A) * hs_norm(B)))
        worst_act = max(worst_act, hs_norm(unvec(S @ vec(A)) - apply_channel(e, A)) / hs_norm(A))
    unital = hs_norm(apply_channel(e, np.eye(e.dim)) - np.eye(e.dim))
    return [
        CheckReport.from_violations(
            "adjointness", [] if worst_adj <= 1e-12 else [f"residual {worst_adj:.3e}"],
            max_relative_residual=worst_adj,
        ),
        CheckReport.from_violations(
            "superoperator_action", [] if worst_act <= 1e-12 else [f"residual {worst_act:.3e}"],
            max_relative_residual=worst_act,
        ),
        CheckReport.from_violations(
            "unitality", [] if unital <= 1e-10 else [f"||Phi(I) - I|| = {unital:.3e}"],
            residual=unital,
        ),
    ]


def convergence_checks(e, S, space, threshold, rng, max_steps):
    d = e.dim
    mu = asymptotics.subdominant_modulus(S)
    n_req = steps_to_converge(mu, d, threshold)
    out = []
    if n_req > max_steps:
        reason = f"needs ~{n_req} steps (subdominant modulus {mu:.6g}), limit {max_steps}"
        return [_skip("state_convergence", reason), _skip("operator_convergence", reason)]

    worst, herm, trace = 0.0, 0.0, 0.0
    for _ in range(3):
        rho0 = random_density(d, rng)
        for n in (n_req, n_req + 1):
            rho_n = iterate(e, rho0, n)
            lim = asymptotics.asymptotic_state(space, rho0, n)
            worst = max(worst, hs_norm(rho_n - lim))
            herm = max(herm, float(np.max(np.abs(lim - lim.conj().T))))
            trace = max(trace, abs(np.trace(lim) - 1))
    violations = []
    if worst > threshold:
        violations.append(f"||rho(n) - rho_inf(n)|| = {worst:.3e} at n = {n_req}")
    if herm > 1e-10:
        violations.append(f"asymptotic state not hermitian ({herm:.3e})")
    if trace > 1e-9:
        violations.append(f"asymptotic state trace defect {trace:.3e}")
    out.append(CheckReport.from_violations(
        "state_convergence", violations, steps=n_req, max_distance=worst,
        subdominant_modulus=mu, hermiticity=herm, trace_defect=float(trace),
    ))

    if d > OPERATOR_TRACE_MAX_D:
        out.append(_skip("operator_convergence", f"d = {d} > {OPERATOR_TRACE_MAX_D}"))
        return out
    dist = asymptotics.operator_distance_trace(S, space, n_req)
    final = dist[-1][1]
    out.append(CheckReport.from_violations(
        "operator_convergence",
        [] if final <= threshold else [f"||Phi^n - Phi_ass^n|| = {final:.3e} at n = {n_req}"],
        steps=n_req, final_distance=final,
    ))
    return out


def choi_checks(e, S, space, rng):
    out = [
        choi.check_choi("Phi", choi.reshuffle(S)),
        choi.check_choi("Phi^5", choi.reshuffle(np.linalg.matrix_power(S, 5))),
    ]
    for n in (-2, -1, 0, 1, 2):
        out.append(choi.check_choi(f"Phi_ass^{n}", choi.choi_of_asymptotic(space, n)))
    out.append(choi.check_dual_route(space))
    samples = [random_matrix(e.dim, rng) for _ in range(50)]
    out.append(choi.check_positivity_inequality(space, samples))
    control = choi.audit(choi.reshuffle(choi.transpose_superoperator(2)))
    out.append(CheckReport.from_violations(
        "negative_control_transpose",
        [] if not control.cp else ["transpose map was not flagged as non-CP"],
        min_eigenvalue=control.min_eigenvalue,
    ))
    return out


def contains_identity(e, tol=1e-10):
    """True if some member is a global phase times the identity."""
    d = e.dim
    for U in e.unitaries:
        if hs_norm(U - U[0, 0] * np.eye(d)) <= tol * math.sqrt(d):
            return True
    return False


def run_verification(e, *, circle_tol=CIRCLE_TOL, null_tol=NULL_TOL,
                     threshold=asymptotics.CONVERGENCE_THRESHOLD,
                     max_order=MAX_ROOT_ORDER, max_steps=MAX_STEPS, seed=SEED):
    """Return ``(space, classification, checks)`` for ensemble ``e``."""
    rng = rng_from(seed)
    S = superoperator(e)
    space = build_attractor_space(e, S=S, circle_tol=circle_tol, null_tol=null_tol)
    cls = asymptotics.classify_asymptotics(space, max_order)

    checks = []
    checks += channel_checks(e, S, rng)
    checks += contraction_checks(e, S, rng)
    checks.append(attractors.check_structure(e, space, S, null_tol=null_tol))
    checks.append(attractors.check_membership(e, space))
    checks.append(attractors.check_orthogonality(space))
    checks.append(attractors.check_trace_property(space))
    checks.append(attractors.check_unitality_resolution(space))
    checks.append(attractors.check_diagonalizability(S, space.spectrum, null_tol))
    if space.total_dim <= CLOSURE_MAX_DIM:
        checks.append(attractors.check_closure(space))
    else:
        checks.append(_skip("closure", f"attractor dimension {space.total_dim} > {CLOSURE_MAX_DIM}"))
    checks.append(asymptotics.check_projector(space, S))
    checks.append(asymptotics.check_propagator(space, cls))
    if contains_identity(e):
        ok = cls.regime is asymptotics.Regime.STATIONARY
        checks.append(CheckReport.from_violations(
            "identity_implies_stationary", [] if ok else [f"classified {cls}"],
        ))
    checks += choi_checks(e, S, space, rng)
    checks += convergence_checks(e, S, space, threshold, rng, max_steps)
    return space, cls, checks


def overall_status(checks, allow_skip=False):
    ok = {PASS, SKIPPED} if allow_skip else {PASS}
    return all(c.status in ok for c in checks)
