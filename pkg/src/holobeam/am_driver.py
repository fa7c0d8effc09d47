"""Alternating maximization over the digital, holographic, and passive
beamformers for one channel realization.

One outer iteration refreshes the zero-forcing digital beamformer, then the
surface amplitudes, then (in optimized mode) the RIS phases, recording the
observed-CSI sum-rate after every sub-step. Solvers only ever see the
observed channel set; the final reported rates are evaluated on the true set
so estimation error shows its actual cost.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import assemble_h_tot
from .holo_bf import solve_p2
from .rhs import holographic_pattern, uniform_beam_weights
from .ris_opt import build_ris_link, solve_p3
from .digital_bf import solve_p1

# Outer loop stops early once the end-of-iteration rate moves by less than
# this relative amount.
CONVERGENCE_RTOL = 1e-4

RCG_MAX_ITERS = 150
RCG_GRAD_TOL = 1e-6
SCA_ROUNDS = 3


@dataclass(frozen=True)
class BeamformerState:
    f: np.ndarray                # (N_RF, K) digital beamformer
    m: np.ndarray                # (N_t,) surface amplitudes in [0, 1]
    theta: np.ndarray | None     # (N_RIS,) reflection coefficients, None without RIS
    sum_rate: float              # bps/Hz on the true channels
    per_user_rates: np.ndarray   # (K,) bps/Hz on the true channels


@dataclass(frozen=True)
class AmResult:
    state: BeamformerState
    trace: np.ndarray            # observed-CSI sum-rate after every sub-step
    iters_outer: int
    iters_dinkelbach: int
    iters_rcg: int


def sum_rate(h_tot, m_v, f, sigma2):
    """Per-user rates and total (bps/Hz) for the full interference model."""
    z = h_tot @ (m_v @ f)  # z[k, k'] stream k' received at user k
    powers = np.abs(z) ** 2
    signal = np.diag(powers)
    interference = powers.sum(axis=1) - signal
    rates = np.log2(1.0 + signal / (sigma2 + interference))
    return rates, float(rates.sum())


def _initial_amplitudes(cfg, channels, geom, rng):
    if cfg.m_init == "random":
        return rng.uniform(0.0, 1.0, size=cfg.n_t)
    directions = [
        (
            channels.paths_direct.aod_azimuth[k, 0],
            channels.paths_direct.aod_elevation[k, 0],
        )
        for k in range(cfg.k_users)
    ]
    return holographic_pattern(geom, directions, uniform_beam_weights(cfg.k_users, cfg.n_rf))


def _transmit_power(m_v, f):
    return float(np.sum(np.abs(m_v @ f) ** 2))


def _surface_response(geom, m):
    ideal = m[:, None] * geom.v
    return geom.c @ ideal if geom.coupling_enabled else ideal


def _alternate(cfg, channels_true, channels_obs, geom, rng, mode):
    """Alternating loop shared by the optimized scheme and the baselines.

    Every recorded iterate satisfies the transmit-power budget: the amplitude
    update rescales the digital beamformer back onto the budget (the
    amplitude subproblem itself carries no power constraint), and the digital
    and amplitude sub-steps only replace the incumbent when the observed-CSI
    sum-rate does not drop. Together with the phase solver's ascent this
    makes the recorded trace non-decreasing by construction.

    All sub-solvers work with the full surface response (coupling included
    when enabled): the amplitude surrogate absorbs C by pre-multiplying the
    channel rows, so its quadratic forms stay exact for the coupled signal.
    """
    sigma2 = cfg.noise_watts
    # The phase draw happens in every mode so that paired comparisons across
    # modes consume the random stream identically.
    theta = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, size=cfg.n_ris))
    m = _initial_amplitudes(cfg, channels_obs, geom, rng)

    if mode == "none":
        h_obs = channels_obs.h_d
    else:
        h_obs = assemble_h_tot(channels_obs, theta)
    h_for_p2 = (h_obs @ geom.c) if geom.coupling_enabled else h_obs

    trace = []
    dinkelbach_total = 0
    rcg_total = 0
    iters_outer = 0
    f = None
    rate = -np.inf
    m_v = _surface_response(geom, m)
    previous_rate = None

    for _ in range(max(1, cfg.outer_iterations)):
        dig = solve_p1(h_obs, m_v, sigma2, cfg.p_t_watts)
        candidate_rate = sum_rate(h_obs, m_v, dig.f, sigma2)[1]
        if f is None or candidate_rate >= rate:
            f = dig.f
            rate = candidate_rate
        trace.append(rate)
        if cfg.outer_iterations == 0:
            break
        iters_outer += 1

        p2 = solve_p2(h_for_p2, geom.v, f, m, sigma2, sca_rounds=SCA_ROUNDS)
        dinkelbach_total += p2.dinkelbach_iters
        m_v_cand = _surface_response(geom, p2.m)
        power = _transmit_power(m_v_cand, f)
        if power > 0:
            f_cand = f * np.sqrt(cfg.p_t_watts / power)
            candidate_rate = sum_rate(h_obs, m_v_cand, f_cand, sigma2)[1]
            if candidate_rate >= rate:
                m, m_v, f, rate = p2.m, m_v_cand, f_cand, candidate_rate
        trace.append(rate)

        if mode == "optimized":
            link = build_ris_link(
                channels_obs.h_d, channels_obs.h_r, channels_obs.g_r, m_v, f, sigma2
            )
            # The manifold solver works with the variable whose conjugate is
            # the reflection diagonal used at assembly time.
            p3 = solve_p3(
                link, theta.conj(), max_iters=RCG_MAX_ITERS, grad_tol=RCG_GRAD_TOL
            )
            rcg_total += p3.iters
            theta = p3.theta.conj()
            h_obs = assemble_h_tot(channels_obs, theta)
            h_for_p2 = (h_obs @ geom.c) if geom.coupling_enabled else h_obs
            rate = sum_rate(h_obs, m_v, f, sigma2)[1]
            trace.append(rate)

        if previous_rate is not None and abs(rate - previous_rate) < CONVERGENCE_RTOL * max(
            1.0, abs(previous_rate)
        ):
            break
        previous_rate = rate

    if mode == "none":
        h_true = channels_true.h_d
        theta_out = None
    else:
        h_true = assemble_h_tot(channels_true, theta)
        theta_out = theta
    per_user, total = sum_rate(h_true, m_v, f, sigma2)
    state = BeamformerState(
        f=f, m=m, theta=theta_out, sum_rate=total, per_user_rates=per_user
    )
    return AmResult(
        state=state,
        trace=np.array(trace),
        iters_outer=iters_outer,
        iters_dinkelbach=dinkelbach_total,
        iters_rcg=rcg_total,
    )


def am_optimize(cfg, channels_true, channels_obs, rhs_geom, rng) -> AmResult:
    """Run the alternating loop in the configured RIS mode. With imperfect
    CSI channels_obs carries the perturbed set; otherwise pass the true set
    twice."""
    return _alternate(cfg, channels_true, channels_obs, rhs_geom, rng, cfg.ris_mode)


def run_baseline(cfg, channels, rhs_geom, mode, rng) -> AmResult:
    """Benchmark schemes: mode "none" removes the RIS entirely (the direct
    channel is the effective channel), mode "random" freezes one uniformly
    drawn phase vector. Digital/holographic alternation still runs so the
    comparison against the optimized scheme is fair."""
    if mode not in ("none", "random"):
        raise ValueError(f"unknown baseline mode {mode!r}")
    return _alternate(cfg, channels, channels, rhs_geom, rng, mode)
