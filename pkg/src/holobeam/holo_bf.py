"""Holographic amplitude optimization.

The amplitude subproblem is attacked the way the derivation prescribes: drop
the log via a first-order expansion, linearize each ratio numerator at the
previous amplitude vector, aggregate numerator/denominator matrices over
users, and solve the resulting single-ratio program with the Dinkelbach
method. The inner parametric maximization is a box-constrained concave QP,
handled by projected gradient ascent with Barzilai-Borwein steps. An outer
loop re-linearizes a few times and a non-degradation guard keeps the exact
sum-rate from ever decreasing across a call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class InnerQpError(RuntimeError):
    """Projected-gradient inner solver hit its iteration cap."""


@dataclass(frozen=True)
class FractionalProblem:
    """Quadratic-over-quadratic surrogate data at linearization point m0.

    sigma_mats[k] = u_k u_k^H with u_k = h_k (elementwise) V f_k carries the
    signal power of user k: m^T Re(sigma_mats[k]) m equals
    |h_k^H diag(m) V f_k|^2 for any real m. sigma_tilde_mats[k] sums the same
    construction over the interfering streams k' != k. sigma_sum /
    sigma_tilde_sum are the user-aggregated matrices the Dinkelbach solver
    consumes.
    """

    sigma_mats: np.ndarray        # (K, N_t, N_t) complex, Hermitian PSD
    sigma_tilde_mats: np.ndarray  # (K, N_t, N_t) complex, Hermitian PSD
    sigma_sum: np.ndarray         # (N_t, N_t)
    sigma_tilde_sum: np.ndarray   # (N_t, N_t)
    m0: np.ndarray                # (N_t,) linearization point in [0, 1]
    sigma2: float


@dataclass(frozen=True)
class DinkelbachSolution:
    m: np.ndarray
    lam: float
    iters: int
    lam_trace: np.ndarray  # one entry per iteration, non-decreasing
    gap_trace: np.ndarray  # parametric residuals, non-increasing to <= zeta


@dataclass(frozen=True)
class AmplitudeSolution:
    m: np.ndarray
    objective: float         # exact sum-rate at m (bps/Hz)
    rounds: int
    dinkelbach_iters: int


def build_fractional(h_tot, v, f, m0, sigma2) -> FractionalProblem:
    """Assemble the per-user signal/interference quadratic forms at m0."""
    h_tot = np.asarray(h_tot)
    k_users = h_tot.shape[0]
    n_t = h_tot.shape[1]
    vf = v @ f  # (N_t, K)
    sigma = np.zeros((k_users, n_t, n_t), dtype=complex)
    sigma_tilde = np.zeros((k_users, n_t, n_t), dtype=complex)
    for k in range(k_users):
        u = h_tot[k] * vf[:, k]
        sigma[k] = np.outer(u, u.conj())
        for kp in range(k_users):
            if kp == k:
                continue
            w = h_tot[k] * vf[:, kp]
            sigma_tilde[k] += np.outer(w, w.conj())
    return FractionalProblem(
        sigma_mats=sigma,
        sigma_tilde_mats=sigma_tilde,
        sigma_sum=sigma.sum(axis=0),
        sigma_tilde_sum=sigma_tilde.sum(axis=0),
        m0=np.asarray(m0, dtype=float),
        sigma2=float(sigma2),
    )


_BOUND_TOL = 1e-12


def box_qp_max(a, b, x0=None, tol=1e-8, max_iter=500):
    """Maximize b^T m + m^T A m over the box [0, 1]^N for symmetric NSD A.

    Alternates short monotone Barzilai-Borwein projected-gradient sweeps
    (which identify the active face) with exact conjugate-gradient ascent on
    the free coordinates, bending and pinning whenever a CG step hits a
    bound. Curvature-free CG directions (A is usually singular: low-rank
    interference) ride to the box edge instead. Terminates when the
    gradient-projection residual ||P(m + grad) - m||_inf clears tol on data
    rescaled to order one; concavity makes the returned KKT point a global
    maximizer. max_iter counts outer sweep/subspace cycles.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = b.shape[0]
    if not np.any(a):
        return (b > 0).astype(float)
    data_scale = max(np.max(np.abs(a)), np.max(np.abs(b)))
    a = a / data_scale
    b = b / data_scale

    def grad(m):
        return b + 2.0 * (a @ m)

    def value(m):
        return b @ m + m @ (a @ m)

    def residual_of(m, g):
        return np.max(np.abs(np.clip(m + g, 0.0, 1.0) - m))

    def max_feasible_step(m, d, free_idx):
        """Largest t >= 0 keeping m + t d in the box, plus the blocking index
        (position within free_idx), or (inf, -1) when nothing blocks."""
        mf = m[free_idx]
        t = np.full(d.shape, np.inf)
        up = d > _BOUND_TOL
        dn = d < -_BOUND_TOL
        t[up] = (1.0 - mf[up]) / d[up]
        t[dn] = -mf[dn] / d[dn]
        if t.size == 0 or not np.isfinite(t.min()):
            return np.inf, -1
        pos = int(np.argmin(t))
        return float(t[pos]), pos

    def subspace_cg(m):
        """CG ascent over the free coordinates. A step that bends at a bound
        pins the blocking coordinate for the remainder of the phase (standard
        active-set discipline, prevents ray cycling) and restarts CG on the
        shrunk face. The recursive CG residual is refreshed from the true
        gradient on every restart."""
        m = m.copy()
        phase_pinned = np.zeros(n, dtype=bool)
        budget = 30 * n + 200
        while budget > 0:
            g = grad(m)
            free = ~(
                ((m <= _BOUND_TOL) & (g <= 0))
                | ((m >= 1.0 - _BOUND_TOL) & (g >= 0))
                | phase_pinned
            )
            free_idx = np.flatnonzero(free)
            if free_idx.size == 0:
                return m
            h = -2.0 * a[np.ix_(free_idx, free_idx)]  # PSD curvature
            x = m[free_idx]
            r = g[free_idx].copy()
            d = r.copy()
            rr = float(r @ r)
            bent = False
            since_refresh = 0
            while budget > 0:
                budget -= 1
                if np.sqrt(rr) <= 0.01 * tol:
                    break
                hd = h @ d
                dhd = float(d @ hd)
                t_max, blocker = max_feasible_step(m, d, free_idx)
                if dhd <= 1e-16 * float(d @ d):
                    if blocker < 0:
                        return m  # flat unbounded direction: outer loop decides
                    x = np.clip(x + t_max * d, 0.0, 1.0)
                    m[free_idx] = x
                    phase_pinned[free_idx[blocker]] = True
                    bent = True
                    break
                alpha = rr / dhd
                if alpha >= t_max:
                    x = np.clip(x + t_max * d, 0.0, 1.0)
                    m[free_idx] = x
                    phase_pinned[free_idx[blocker]] = True
                    bent = True
                    break
                x = x + alpha * d
                m[free_idx] = x
                since_refresh += 1
                if since_refresh >= 50:  # recursive residual drifts when H is ill-conditioned
                    r = grad(m)[free_idx]
                    d = r.copy()
                    since_refresh = 0
                else:
                    r = r - alpha * hd
                rr_new = float(r @ r)
                if since_refresh:
                    d = r + (rr_new / rr) * d
                rr = rr_new
            if not bent:
                return m
        return m

    m = np.clip(np.full(n, 0.5) if x0 is None else np.asarray(x0, dtype=float), 0.0, 1.0)
    g = grad(m)
    q = value(m)
    fallback_step = 1.0 / (2.0 * np.linalg.norm(a, "fro") + 1e-30)
    step = fallback_step
    residual = np.inf
    for _ in range(max_iter):
        residual = residual_of(m, g)
        if residual <= tol:
            return m
        # projection sweep: a few monotone spectral steps
        for _ in range(4):
            alpha = step
            for _ in range(60):
                m_new = np.clip(m + alpha * g, 0.0, 1.0)
                d = m_new - m
                q_new = value(m_new)
                if q_new >= q + 1e-4 * (g @ d) or alpha < 1e-20:
                    break
                alpha *= 0.5
            s = m_new - m
            g_new = grad(m_new)
            y = g_new - g
            sy = -(s @ y)  # = -2 s^T A s >= 0 for NSD A
            step = (s @ s) / sy if sy > 1e-30 else fallback_step
            step = float(np.clip(step, 1e-12, 1e12))
            m, g, q = m_new, g_new, q_new
        if residual_of(m, g) <= tol:
            return m
        # subspace phase: exact CG on the identified face (monotone ascent by
        # construction; near convergence the value change sits below rounding,
        # so acceptance must not be gated on it)
        m_sub = subspace_cg(m)
        g_sub = grad(m_sub)
        if residual_of(m_sub, g_sub) <= tol:
            return m_sub
        q_sub = value(m_sub)
        if q_sub >= q - 1e-9 * (1.0 + abs(q)):
            m, g, q = m_sub, g_sub, q_sub
    raise InnerQpError(
        f"inner QP failed: residual {residual:.3e} after {max_iter} iterations at m={m!r}"
    )


def dinkelbach_solve(fp: FractionalProblem, zeta=1e-6, max_iter=50) -> DinkelbachSolution:
    """Dinkelbach iteration for the aggregated linearized ratio.

    Maximizes (2 m0^T S m - m0^T S m0) / (m^T T m + sigma2) over the box with
    S = Re(sigma_sum), T = Re(sigma_tilde_sum). Each parametric subproblem
    max 2 m0^T S m - lam m^T T m is the concave box QP above (the subtracted
    constants do not move the argmax); the ratio updates lam and the loop
    stops once the parametric residual N(m) - lam D(m), which differs from
    the raw parametric value only by those constants, falls to zeta.
    """
    s = np.real(fp.sigma_sum)
    s = 0.5 * (s + s.T)
    t = np.real(fp.sigma_tilde_sum)
    t = 0.5 * (t + t.T)
    # The ratio is invariant under a joint scaling of (S, T, sigma2); rescale
    # to order one so the inner solver's absolute tolerances are meaningful at
    # physical channel magnitudes.
    scale = max(np.max(np.abs(s)), np.max(np.abs(t)), fp.sigma2)
    if scale == 0.0:
        return DinkelbachSolution(fp.m0.copy(), 0.0, 0, np.zeros(0), np.zeros(0))
    s = s / scale
    t = t / scale
    sigma2 = fp.sigma2 / scale
    m0 = fp.m0
    b = 2.0 * (s @ m0)
    numer_const = float(m0 @ (s @ m0))

    def numer(m):
        return float(b @ m) - numer_const

    def denom(m):
        return float(m @ (t @ m)) + sigma2

    if not np.any(t):  # constant denominator: single linear maximization
        m = (b > 0).astype(float)
        lam = numer(m) / denom(m)
        return DinkelbachSolution(m, lam, 1, np.array([lam]), np.array([0.0]))

    lam = 0.0
    m = m0.copy()
    lam_trace = []
    gap_trace = []
    iters = 0
    for _ in range(max_iter):
        iters += 1
        m = box_qp_max(-lam * t, b, x0=m)
        gap = numer(m) - lam * denom(m)
        lam = numer(m) / denom(m)
        lam_trace.append(lam)
        gap_trace.append(gap)
        if gap <= zeta:
            break
    return DinkelbachSolution(m, lam, iters, np.array(lam_trace), np.array(gap_trace))


def p2_objective(h_tot, v, f, m, sigma2):
    """Exact amplitude-subproblem objective: the sum-rate (bps/Hz) obtained
    with amplitudes m while the digital beamformer and phases stay fixed."""
    z = h_tot @ (np.asarray(m)[:, None] * (v @ f))  # z[k, k'] stream k' at user k
    p = np.abs(z) ** 2
    signal = np.diag(p)
    interference = p.sum(axis=1) - signal
    return float(np.sum(np.log2(1.0 + signal / (sigma2 + interference))))


def solve_p2(h_tot, v, f, m_init, sigma2, sca_rounds=3, zeta=1e-6, max_iter=50) -> AmplitudeSolution:
    """Successive linearization rounds around the incumbent amplitudes.

    Each round rebuilds the surrogate at the current point and runs the
    Dinkelbach solver. Because the surrogate is not the exact objective, a
    round can in principle degrade the true sum-rate; the incumbent is only
    replaced when the exact objective does not decrease, which keeps the
    alternating-maximization trace monotone.
    """
    m_best = np.clip(np.asarray(m_init, dtype=float), 0.0, 1.0)
    val_best = p2_objective(h_tot, v, f, m_best, sigma2)
    total_iters = 0
    rounds = 0
    for _ in range(sca_rounds):
        fp = build_fractional(h_tot, v, f, m_best, sigma2)
        sol = dinkelbach_solve(fp, zeta=zeta, max_iter=max_iter)
        total_iters += sol.iters
        rounds += 1
        val = p2_objective(h_tot, v, f, sol.m, sigma2)
        if val < val_best:
            break  # re-linearizing at the kept point would only repeat itself
        if np.array_equal(sol.m, m_best):
            val_best = val
            break
        m_best, val_best = sol.m, val
    return AmplitudeSolution(m=m_best, objective=val_best, rounds=rounds, dinkelbach_iters=total_iters)
