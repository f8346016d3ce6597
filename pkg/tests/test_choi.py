import numpy as np
import pytest

from ruo.asymptotics import asymptotic_propagator
from ruo.attractors import build_attractor_space
from ruo.channel import superoperator, validate_ensemble
from ruo.choi import (
    audit,
    check_dual_route,
    check_positivity_inequality,
    choi_of_asymptotic,
    partial_trace,
    positivity_functional,
    reshuffle,
    transpose_superoperator,
)
from ruo.errors import ShapeError
from ruo.linalg import unvec, vec
from ruo.sampling import random_matrix, random_unitary


def index_oracle(S, d):
    """D[(m,n),(mu,nu)] = S[(m,mu),(n,nu)] by explicit loops."""
    D = np.zeros_like(S)
    for m in range(d):
        for n in range(d):
            for mu in range(d):
                for nu in range(d):
                    D[m * d + n, mu * d + nu] = S[m * d + mu, n * d + nu]
    return D


class TestReshuffle:
    def test_identity_superoperator(self):
        D = reshuffle(np.eye(4))
        omega = vec(np.eye(2))
        assert np.array_equal(D, np.outer(omega, omega))
        assert np.array_equal(D, index_oracle(np.eye(4), 2))

    def test_matches_loops(self, rng):
        S = random_matrix(9, rng)
        assert np.array_equal(reshuffle(S), index_oracle(S, 3))

    def test_involution(self, rng):
        for _ in range(10):
            S = random_matrix(16, rng)
            assert np.array_equal(reshuffle(reshuffle(S)), S)

    def test_cnot_hermitian(self, cnot):
        D = reshuffle(superoperator(cnot))
        assert np.linalg.norm(D - D.conj().T) <= 1e-12

    def test_bad_size(self):
        with pytest.raises(ShapeError):
            reshuffle(np.eye(5))


class TestPartialTrace:
    def test_kronecker_oracle(self, rng):
        A, B = random_matrix(3, rng), random_matrix(3, rng)
        C = np.kron(A, B)
        # C[(m,mu),(n,nu)] = A[m,n] B[mu,nu]
        assert C[1 * 3 + 2, 0 * 3 + 1] == pytest.approx(A[1, 0] * B[2, 1], rel=1e-15)
        assert np.allclose(partial_trace(C, "A"), np.trace(A) * B)
        assert np.allclose(partial_trace(C, "B"), np.trace(B) * A)

    def test_trace_preserved(self, rng):
        D = random_matrix(9, rng)
        for which in "AB":
            assert partial_trace(D, which).trace() == pytest.approx(D.trace())

    def test_linear(self, rng):
        D1, D2 = random_matrix(4, rng), random_matrix(4, rng)
        assert np.allclose(partial_trace(2 * D1 + D2, "A"),
                           2 * partial_trace(D1, "A") + partial_trace(D2, "A"))

    def test_ruo_marginals(self, builtin_ensemble):
        D = reshuffle(superoperator(builtin_ensemble))
        eye = np.eye(builtin_ensemble.dim)
        assert np.allclose(partial_trace(D, "A"), eye, atol=1e-12)
        assert np.allclose(partial_trace(D, "B"), eye, atol=1e-12)

    def test_marginals_distinguish_tp_from_unital(self):
        # amplitude damping: trace preserving, not unital
        g = 0.3
        K0 = np.array([[1, 0], [0, np.sqrt(1 - g)]])
        K1 = np.array([[0, np.sqrt(g)], [0, 0]])
        S = np.kron(K0, K0.conj()) + np.kron(K1, K1.conj())
        D = reshuffle(S)
        assert np.allclose(partial_trace(D, "A"), np.eye(2))
        assert not np.allclose(partial_trace(D, "B"), np.eye(2))
        a = audit(D)
        assert a.trace_preserving and not a.unital and a.cp

    def test_bad_subsystem(self):
        with pytest.raises(ValueError):
            partial_trace(np.eye(4), "C")


class TestAudit:
    def test_cnot_passes(self, cnot):
        a = audit(reshuffle(superoperator(cnot)))
        assert a.passed

    def test_asymptotic_cp(self, cnot):
        space = build_attractor_space(cnot)
        a = audit(choi_of_asymptotic(space, 1))
        assert a.min_eigenvalue >= -1e-9 and a.passed

    def test_transpose_not_cp(self):
        a = audit(reshuffle(transpose_superoperator(2)))
        assert not a.cp
        assert a.min_eigenvalue == pytest.approx(-1.0, abs=1e-12)
        assert a.hermitian and a.trace_preserving and a.unital

    def test_transpose_superoperator_action(self, rng):
        A = random_matrix(3, rng)
        assert np.array_equal(unvec(transpose_superoperator(3) @ vec(A)), A.T)

    def test_does_not_mutate(self, cnot):
        D = reshuffle(superoperator(cnot))
        before = D.copy()
        audit(D)
        assert np.array_equal(D, before)

    @pytest.mark.parametrize("n", [1, 2, 5])
    def test_powers(self, builtin_ensemble, n):
        S = np.linalg.matrix_power(superoperator(builtin_ensemble), n)
        assert audit(reshuffle(S)).passed


class TestAsymptoticChoi:
    @pytest.mark.parametrize("n", [-2, -1, 0, 1, 2, 7])
    def test_dual_route(self, cnot, n):
        space = build_attractor_space(cnot)
        D = choi_of_asymptotic(space, n)
        assert np.linalg.norm(D - reshuffle(asymptotic_propagator(space, n))) <= 1e-10

    def test_projector_choi_norm_and_trace(self, cnot):
        space = build_attractor_space(cnot)
        D = choi_of_asymptotic(space, 0)
        # reshuffling keeps the Frobenius norm, and the projector has rank 6
        assert np.linalg.norm(D) ** 2 == pytest.approx(6, abs=1e-12)
        # Tr(X (x) X*) = |Tr X|^2, which sums to Tr I for a trace-preserving map
        assert np.trace(D) == pytest.approx(4, abs=1e-12)

    def test_identity_channel(self):
        space = build_attractor_space(validate_ensemble([(1.0, np.eye(2))]))
        omega = vec(np.eye(2))
        for n in (-1, 0, 3):
            assert np.allclose(choi_of_asymptotic(space, n), np.outer(omega, omega), atol=1e-12)

    def test_check_helpers(self, builtin_ensemble, rng):
        space = build_attractor_space(builtin_ensemble)
        assert check_dual_route(space).passed
        samples = [random_matrix(builtin_ensemble.dim, rng) for _ in range(50)]
        assert check_positivity_inequality(space, samples).passed

    def test_positivity_functional_real(self, rng):
        e = validate_ensemble([(0.5, random_unitary(2, rng)), (0.5, random_unitary(2, rng))])
        space = build_attractor_space(e)
        v = positivity_functional(space, random_matrix(2, rng))
        assert abs(v.imag) < 1e-12 and v.real >= -1e-9
