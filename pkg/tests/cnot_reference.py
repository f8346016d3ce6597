"""Reference data for the two-CNOT example, typed in from the published matrices."""

import numpy as np

S3 = 1 / np.sqrt(3)
S6 = 1 / np.sqrt(6)

X_1 = [
    np.array([[1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]], dtype=complex),
    S6 * np.array([[0, 0, 0, 0], [0, 0, 1, 1], [0, 1, 0, 1], [0, 1, 1, 0]], dtype=complex),
    S3 * np.array([[0, 1, 1, 1], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]], dtype=complex),
    S3 * np.array([[0, 0, 0, 0], [1, 0, 0, 0], [1, 0, 0, 0], [1, 0, 0, 0]], dtype=complex),
    S3 * np.array([[0, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], dtype=complex),
]
X_MINUS_1 = [
    S6 * np.array([[0, 0, 0, 0], [0, 0, -1, 1], [0, 1, 0, -1], [0, -1, 1, 0]], dtype=complex),
]


def limit_matrices(rho):
    """Even- and odd-step limits of the two-CNOT channel from the closed form."""
    a = rho[0, 0]
    b = (rho[1, 1] + rho[2, 2] + rho[3, 3]) / 3
    c = (rho[0, 1] + rho[0, 2] + rho[0, 3]) / 3
    d = (rho[1, 2] + rho[2, 3] + np.conj(rho[1, 3])) / 3
    cc, dc = np.conj(c), np.conj(d)
    even = np.array([
        [a, c, c, c],
        [cc, b, d, dc],
        [cc, dc, b, d],
        [cc, d, dc, b],
    ])
    odd = np.array([
        [a, c, c, c],
        [cc, b, dc, d],
        [cc, d, b, dc],
        [cc, dc, d, b],
    ])
    return even, odd
