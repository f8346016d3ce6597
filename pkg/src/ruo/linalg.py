"""Dense complex matrix primitives.

Operators on a d-dimensional Hilbert space are plain ``(d, d)`` complex
arrays. Vectorization is row-major, ``vec(A) = (A11, A12, ..., A1d, A21, ...)``,
so that ``vec(A @ B @ C) == kron(A, C.T) @ vec(B)``.
"""

import math

import numpy as np
import scipy.linalg

from ruo.errors import NumericError, ShapeError

EPS = np.finfo(float).eps

#: Gram-Schmidt drops a vector whose residual falls below this fraction of its
#: original norm.
GS_DROP_TOL = 1e-10


def _square(A, name="matrix"):
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {A.shape}")
    return A


def hs_inner(A, B):
    """Hilbert-Schmidt inner product ``Tr(A^dagger B)``."""
    A = _square(A, "A")
    B = _square(B, "B")
    if A.shape != B.shape:
        raise ShapeError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return complex(np.vdot(A, B))


def hs_norm(A):
    A = _square(A)
    return float(np.linalg.norm(A))


def vec(A):
    """Row-major vectorization of a square matrix."""
    A = _square(A)
    return np.ascontiguousarray(A).reshape(-1).copy()


def unvec(v):
    v = np.asarray(v)
    if v.ndim != 1:
        raise ShapeError(f"operator vector must be 1-D, got shape {v.shape}")
    d = math.isqrt(v.size)
    if d * d != v.size or d == 0:
        raise ShapeError(f"length {v.size} is not a perfect square")
    return v.reshape(d, d).copy()


def kron(A, B):
    return np.kron(np.asarray(A), np.asarray(B))


def fix_phase(v):
    """Rotate ``v`` so that its first entry of largest modulus is real-positive.

    Works on vectors and matrices alike (entries taken in row-major order).
    """
    v = np.asarray(v, dtype=complex)
    flat = v.reshape(-1)
    mags = np.abs(flat)
    peak = mags.max() if flat.size else 0.0
    if peak == 0.0:
        return v.copy()
    # first index within roundoff of the peak, so near-ties do not flip order
    k = int(np.argmax(mags >= peak * (1 - 1e-12)))
    return v * (abs(flat[k]) / flat[k])


def default_tol(M):
    return max(np.shape(M)) * EPS


def nullspace(M, tol=None):
    """Orthonormal basis of the numerical null space of ``M``.

    Directions whose singular value is at most ``tol * sigma_max`` count as
    null. Vectors come back ordered by ascending singular value, each with the
    :func:`fix_phase` sign convention. A zero matrix has a full null space.

    Returns a list of 1-D arrays (possibly empty).
    """
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got shape {M.shape}")
    if tol is None:
        tol = default_tol(M)
    if tol < 0:
        raise ValueError(f"tolerance must be nonnegative, got {tol}")
    if not np.all(np.isfinite(M)):
        raise NumericError("matrix contains NaN or Inf")
    n = M.shape[1]
    try:
        _, s, vh = scipy.linalg.svd(M, full_matrices=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericError(f"SVD failed: {exc}") from exc
    smax = s[0] if s.size else 0.0
    sv = np.zeros(n)
    sv[: s.size] = s
    null = [j for j in range(n) if sv[j] <= tol * smax]
    null.sort(key=lambda j: (sv[j], j))
    return [fix_phase(vh[j].conj()) for j in null]


def matrix_rank(M, tol=None):
    """Numerical rank with the same relative threshold as :func:`nullspace`."""
    M = np.asarray(M, dtype=complex)
    if tol is None:
        tol = default_tol(M)
    s = scipy.linalg.svdvals(M)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def _phase_key(z):
    phase = math.atan2(z.imag, z.real) % (2 * math.pi)
    if phase > 2 * math.pi - 1e-12:
        phase = 0.0
    return phase


def eig(M, vectors=True):
    """Eigenpairs of a general complex matrix.

    Sorted by phase in ``[0, 2*pi)``, ties broken by descending modulus.
    Eigenvectors are unit-norm with the :func:`fix_phase` convention.
    With ``vectors=False`` only the sorted eigenvalues are returned.
    """
    M = _square(M)
    if not np.all(np.isfinite(M)):
        raise NumericError("matrix contains NaN or Inf")
    try:
        if vectors:
            w, v = scipy.linalg.eig(M)
        else:
            w, v = scipy.linalg.eigvals(M), None
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericError(
            f"eigensolver did not converge on {M.shape} matrix: {exc}"
        ) from exc
    order = sorted(range(w.size), key=lambda j: (_phase_key(w[j]), -abs(w[j]), j))
    if not vectors:
        return w[order]
    out = []
    for j in order:
        x = v[:, j]
        x = x / np.linalg.norm(x)
        out.append((complex(w[j]), fix_phase(x)))
    return out


def gram_schmidt_hs(ops, drop_tol=GS_DROP_TOL):
    """Modified Gram-Schmidt under the Hilbert-Schmidt inner product.

    Inputs that are (numerically) dependent on earlier ones are dropped.
    Each vector is orthogonalized twice, which keeps the output Gram matrix
    at the identity to roundoff even for nearly dependent inputs.
    """
    ops = [np.asarray(op, dtype=complex) for op in ops]
    if not ops:
        return []
    shape = ops[0].shape
    for op in ops:
        _square(op)
        if op.shape != shape:
            raise ShapeError(f"dimension mismatch: {op.shape} vs {shape}")
    basis = []
    for op in ops:
        norm0 = np.linalg.norm(op)
        if norm0 == 0.0:
            continue
        r = op.copy()
        for _ in range(2):
            for q in basis:
                r = r - np.vdot(q, r) * q
        norm = np.linalg.norm(r)
        if norm <= drop_tol * norm0:
            continue
        basis.append(r / norm)
    return basis


def orthonormal_columns(mats):
    """Stack vectorized matrices as columns of a ``(d*d, k)`` array."""
    mats = list(mats)
    if not mats:
        return np.zeros((0, 0), dtype=complex)
    return np.stack([vec(m) for m in mats], axis=1)


def principal_angles(basis_a, basis_b):
    """Principal angles (radians, descending) between two operator spans.

    Spans of different dimension are reported as maximally separated
    (an angle of pi/2 is appended for every unmatched direction).
    """
    a = orthonormal_columns(basis_a)
    b = orthonormal_columns(basis_b)
    ka = a.shape[1] if a.size else 0
    kb = b.shape[1] if b.size else 0
    if ka == 0 or kb == 0:
        return np.full(max(ka, kb), math.pi / 2)
    angles = scipy.linalg.subspace_angles(a, b)
    extra = abs(ka - kb)
    return np.concatenate([np.full(extra, math.pi / 2), angles])


def max_angle(basis_a, basis_b):
    angles = principal_angles(basis_a, basis_b)
    return float(angles.max()) if angles.size else 0.0
