"""Seeded random operators for tests and the ``verify`` command."""

import numpy as np
from scipy.stats import unitary_group


def rng_from(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_unitary(d, rng=None):
    return unitary_group.rvs(d, random_state=rng_from(rng))


def random_matrix(d, rng=None):
    rng = rng_from(rng)
    return rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))


def random_density(d, rng=None, rank=None):
    """Random full-rank (or given-rank) density matrix ``G G^dag / Tr``."""
    rng = rng_from(rng)
    k = d if rank is None else rank
    G = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    rho = G @ G.conj().T
    rho = (rho + rho.conj().T) / 2
    return rho / np.trace(rho).real
