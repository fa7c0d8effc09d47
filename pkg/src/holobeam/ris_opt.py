"""RIS phase optimization on the complex circle manifold.

The sum-rate is rewritten over the phase vector through the cascade vectors
a_{k',k} and direct-link scalars b_{k',k}, then maximized with a Riemannian
conjugate gradient: project the Euclidean gradient onto the circle, build a
Polak-Ribiere conjugate direction with vector transport, and retract each
Armijo-accepted step back to unit modulus. Gradients are taken on the
natural-log objective (a positive constant times the reported bps/Hz value,
so the maximizer is unchanged); rates are reported in log2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

LN2 = float(np.log(2.0))

# Line-search constants: sufficient-increase 1e-4, halving backtracker from
# unit step, at most 50 halvings before the current point is accepted.
ARMIJO_SLOPE = 1e-4
ARMIJO_SHRINK = 0.5
ARMIJO_MAX_HALVINGS = 50


class RetractionError(ValueError):
    """Retraction hit a zero entry (theta + step * eta vanished somewhere)."""


@dataclass(frozen=True)
class RisLink:
    """Phase-independent factorization of the received signal.

    a[kp, k] is the length-N_RIS cascade vector of stream kp at user k
    (diag(h_R,k^H) G_R M_v f_kp); b[kp, k] the corresponding direct-link
    scalar h_d,k^H M_v f_kp. The manifold variable theta enters only through
    theta^H a[kp, k] + b[kp, k].
    """

    a: np.ndarray  # (K, K, N_RIS) complex
    b: np.ndarray  # (K, K) complex
    sigma2: float


@dataclass(frozen=True)
class PhaseSolution:
    theta: np.ndarray
    trace: np.ndarray           # objective (bps/Hz) per accepted iterate
    iters: int
    converged: bool
    line_search_failed: bool
    iterates: list = field(default_factory=list)


def build_ris_link(h_d, h_r, g_r, m_v, f, sigma2) -> RisLink:
    """Precompute the cascade vectors and direct scalars for fixed (M_v, F)."""
    t = m_v @ f                      # (N_t, K)
    gt = g_r @ t                     # (N_RIS, K)
    a = np.einsum("kn,np->pkn", h_r, gt)
    b = (h_d @ t).T
    return RisLink(a=a, b=b, sigma2=float(sigma2))


def _signal_terms(link, theta):
    """z[kp, k] = theta^H a[kp, k] + b[kp, k] and the per-user power sums."""
    z = np.tensordot(link.a, theta.conj(), axes=([2], [0])) + link.b
    powers = np.abs(z) ** 2
    total = powers.sum(axis=0) + link.sigma2          # signal + interference + noise
    interference = total - np.diag(powers)            # without the own stream
    return z, total, interference


def objective(link, theta):
    """Sum-rate in bps/Hz at phase vector theta."""
    _, total, interference = _signal_terms(link, theta)
    return float(np.sum(np.log2(total / interference)))


def _objective_ln(link, theta):
    _, total, interference = _signal_terms(link, theta)
    return float(np.sum(np.log(total / interference)))


def euclidean_gradient(link, theta):
    """Gradient of the natural-log objective with respect to theta.

    Each user contributes 2 (U_k / total_k - (U_k - own_k) / interference_k)
    with U_k = sum_kp a[kp,k] conj(z[kp,k]) and own_k the kp = k term;
    both denominators carry the noise floor.
    """
    z, total, interference = _signal_terms(link, theta)
    full = np.einsum("pkn,pk->kn", link.a, z.conj())
    k_users = link.b.shape[0]
    own = link.a[np.arange(k_users), np.arange(k_users)] * np.diag(z).conj()[:, None]
    terms = full / total[:, None] - (full - own) / interference[:, None]
    return 2.0 * terms.sum(axis=0)


def riemannian_gradient(theta, egrad):
    """Orthogonal projection of the Euclidean gradient onto the circle:
    grad = egrad - Re(egrad o theta*) o theta."""
    return egrad - np.real(egrad * theta.conj()) * theta


def transport(theta_new, eta):
    """Carry a tangent vector to the tangent space at theta_new."""
    return eta - np.real(eta * theta_new.conj()) * theta_new


def retract(theta, eta, step):
    """Map theta + step * eta back to unit modulus, elementwise."""
    moved = theta + step * eta
    mags = np.abs(moved)
    if np.any(mags == 0.0):
        raise RetractionError("retraction singularity")
    return moved / mags


def solve_p3(link, theta_init, max_iters=150, grad_tol=1e-6, keep_iterates=False) -> PhaseSolution:
    """Riemannian conjugate gradient ascent from a unit-modulus start.

    Search directions use Polak-Ribiere conjugation with transport, restarting
    to steepest ascent whenever the coefficient would go negative, the
    direction stops being an ascent direction, or every N_RIS iterations.
    Armijo backtracking guarantees the objective trace never decreases; a
    retraction singularity inside the line search just halves the step.
    """
    theta = np.asarray(theta_init, dtype=complex)
    n_ris = theta.shape[0]
    f_ln = _objective_ln(link, theta)
    trace = [f_ln / LN2]
    iterates = [theta.copy()] if keep_iterates else []

    grad = riemannian_gradient(theta, euclidean_gradient(link, theta))
    direction = grad
    converged = False
    line_search_failed = False
    iters = 0
    for it in range(1, max_iters + 1):
        grad_sq = float(np.real(np.vdot(grad, grad)))
        if np.sqrt(grad_sq) < grad_tol:
            converged = True
            break
        slope = float(np.real(np.vdot(grad, direction)))
        if slope <= 0.0:  # conjugation lost ascent; restart
            direction = grad
            slope = grad_sq
        step = 1.0
        accepted = None
        for _ in range(ARMIJO_MAX_HALVINGS):
            try:
                candidate = retract(theta, direction, step)
            except RetractionError:
                step *= ARMIJO_SHRINK
                continue
            f_candidate = _objective_ln(link, candidate)
            if f_candidate >= f_ln + ARMIJO_SLOPE * step * slope:
                accepted = (candidate, f_candidate)
                break
            step *= ARMIJO_SHRINK
        if accepted is None:
            line_search_failed = True
            break
        theta_new, f_ln = accepted
        grad_new = riemannian_gradient(theta_new, euclidean_gradient(link, theta_new))
        if it % n_ris == 0:
            beta = 0.0
        else:
            carried = transport(theta_new, grad)
            beta = float(np.real(np.vdot(grad_new, grad_new - carried))) / grad_sq
            beta = max(beta, 0.0)
        direction = grad_new + beta * transport(theta_new, direction)
        theta, grad = theta_new, grad_new
        trace.append(f_ln / LN2)
        if keep_iterates:
            iterates.append(theta.copy())
        iters = it
    return PhaseSolution(
        theta=theta,
        trace=np.array(trace),
        iters=iters,
        converged=converged,
        line_search_failed=line_search_failed,
        iterates=iterates,
    )
