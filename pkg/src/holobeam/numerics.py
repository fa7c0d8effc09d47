"""Small complex linear-algebra kernel shared by all solvers."""

import numpy as np

# Implementation constants, not physics: condition-number ceiling for the
# right pseudo-inverse and eigenvalue floor for the matrix inverse square
# root. The floor must sit below the smallest sinc-kernel eigenvalue of the
# reference surface (an 8x8 grid at quarter-wavelength pitch reaches 2.8e-11).
COND_LIMIT = 1e12
EIG_FLOOR = 1e-12


class RankDeficientError(ValueError):
    """Effective channel Gram matrix is numerically singular."""


class NotPositiveDefiniteError(ValueError):
    """Hermitian matrix handed to inv_sqrt_hermitian is not PD."""


def pinv_right(q):
    """Right pseudo-inverse Q^H (Q Q^H)^-1 of a wide matrix Q (K x N, K <= N).

    Raises RankDeficientError when Q Q^H has condition number above
    COND_LIMIT, which signals an unusable channel draw.
    """
    q = np.asarray(q, dtype=complex)
    gram = q @ q.conj().T
    eigs = np.linalg.eigvalsh(gram)
    if eigs[0] <= 0 or eigs[-1] / eigs[0] > COND_LIMIT:
        raise RankDeficientError("rank-deficient effective channel")
    return np.linalg.solve(gram, q).conj().T


def inv_sqrt_hermitian(d):
    """Inverse square root D^(-1/2) of a Hermitian positive-definite matrix.

    The result C is Hermitian and satisfies C C D = I. Raises
    NotPositiveDefiniteError when the smallest eigenvalue is at or below
    EIG_FLOOR (for the coupling model that means the element spacing is too
    small for the sinc kernel).
    """
    d = np.asarray(d, dtype=complex)
    eigvals, eigvecs = np.linalg.eigh(d)
    if eigvals[0] <= EIG_FLOOR:
        raise NotPositiveDefiniteError("coupling matrix not positive definite")
    c = (eigvecs * (eigvals ** -0.5)) @ eigvecs.conj().T
    return 0.5 * (c + c.conj().T)


def sinc_norm(x):
    """Normalized sinc, sin(pi x) / (pi x), with sinc_norm(0) = 1."""
    return np.sinc(x)


def dbm_to_watts(dbm):
    """Power conversion: 10^((dBm - 30) / 10)."""
    return 10.0 ** ((dbm - 30.0) / 10.0)
