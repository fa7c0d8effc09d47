"""Digital beamformer: zero-forcing on the effective channel followed by
water-filling power allocation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import RankDeficientError, pinv_right


class ZfInfeasibleError(RankDeficientError):
    """Channel draw on which the zero-forcing Gram matrix is singular."""


@dataclass(frozen=True)
class DigitalBeamformer:
    f_tilde: np.ndarray  # (N_RF, K) unnormalized zero-forcing columns
    p: np.ndarray        # (K,) allocated received powers
    f: np.ndarray        # (N_RF, K) = f_tilde diag(sqrt(p))
    mu: np.ndarray       # (K,) diagonal loads of f_tilde^H M_v^H M_v f_tilde
    epsilon: float       # water-level parameter (1 / epsilon is the level)


def zf_beamformer(h_tot, m_v):
    """Unnormalized zero-forcing beamformer for the effective channel.

    Q has row k equal to h_tot,k^H M_v; the result is the right pseudo-inverse
    Q^H (Q Q^H)^-1, so h_tot,k^H M_v f_tilde_k' = delta_{k,k'}.
    """
    q = h_tot @ m_v
    try:
        return pinv_right(q)
    except RankDeficientError as exc:
        raise ZfInfeasibleError("ZF infeasible for this channel draw") from exc


def water_fill(mu, sigma2, p_t):
    """Water-filling powers p_k = (1/mu_k) max(1/eps - mu_k sigma2, 0).

    The water level w = 1/eps solves sum_k max(w - mu_k sigma2, 0) = p_t by
    the sorted active-set closed form. Returns (p, eps).
    """
    mu = np.asarray(mu, dtype=float)
    if np.any(mu <= 0):
        raise ValueError("water_fill requires positive diagonal loads")
    if p_t <= 0:
        raise ValueError("water_fill requires a positive power budget")
    floors = mu * sigma2
    order = np.argsort(floors)
    sorted_floors = floors[order]
    # With the n smallest floors active, w = (p_t + sum of those floors) / n.
    level = None
    cumulative = 0.0
    for n in range(1, len(mu) + 1):
        cumulative += sorted_floors[n - 1]
        candidate = (p_t + cumulative) / n
        upper = sorted_floors[n] if n < len(mu) else np.inf
        if candidate > sorted_floors[n - 1] and candidate <= upper:
            level = candidate
            break
    if level is None:  # numerical ties; fall back to the full active set
        level = (p_t + floors.sum()) / len(mu)
    p = np.maximum(level - floors, 0.0) / mu
    return p, 1.0 / level


def solve_p1(h_tot, m_v, sigma2, p_t):
    """Zero-forcing plus water-filling for one (channel, surface) pair.

    The diagonal loads mu use the full surface response including coupling so
    the transmit-power constraint Tr(M_v F F^H M_v^H) <= P_T matches the
    physically radiated signal.
    """
    f_tilde = zf_beamformer(h_tot, m_v)
    effective = m_v @ f_tilde
    mu = np.real(np.sum(np.abs(effective) ** 2, axis=0))
    p, epsilon = water_fill(mu, sigma2, p_t)
    f = f_tilde * np.sqrt(p)
    return DigitalBeamformer(f_tilde=f_tilde, p=p, f=f, mu=mu, epsilon=epsilon)
