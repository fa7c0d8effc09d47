import numpy as np
import pytest

from holobeam.ris_opt import (
    LN2,
    RisLink,
    _objective_ln,
    build_ris_link,
    euclidean_gradient,
    objective,
    retract,
    riemannian_gradient,
    solve_p3,
    transport,
)


def random_link(rng, k=2, n=6, sigma2=1.0):
    a = (rng.standard_normal((k, k, n)) + 1j * rng.standard_normal((k, k, n))) / np.sqrt(2)
    b = (rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))) / np.sqrt(2)
    return RisLink(a=a, b=b, sigma2=sigma2)


def random_theta(rng, n):
    return np.exp(1j * rng.uniform(0, 2 * np.pi, n))


def fd_gradient(link, theta, h=1e-6):
    """Central finite differences of the natural-log objective, treating each
    entry's real and imaginary parts as independent coordinates."""
    n = theta.shape[0]
    out = np.zeros(n, dtype=complex)
    for i in range(n):
        e = np.zeros(n, dtype=complex)
        e[i] = 1.0
        fr = _objective_ln(link, theta + h * e) - _objective_ln(link, theta - h * e)
        fi = _objective_ln(link, theta + 1j * h * e) - _objective_ln(link, theta - 1j * h * e)
        out[i] = fr / (2 * h) + 1j * fi / (2 * h)
    return out


class TestObjective:
    def test_theta_independent_without_cascade(self):
        rng = np.random.default_rng(0)
        link = random_link(rng, k=2, n=5)
        link = RisLink(a=np.zeros_like(link.a), b=link.b, sigma2=1.0)
        v1 = objective(link, random_theta(rng, 5))
        v2 = objective(link, random_theta(rng, 5))
        assert v1 == pytest.approx(v2, abs=1e-14)

    def test_single_user_modulus_invariance(self):
        n = 4
        a = np.zeros((1, 1, n), dtype=complex)
        a[0, 0, 0] = 1.0
        link = RisLink(a=a, b=np.zeros((1, 1), dtype=complex), sigma2=1.0)
        rng = np.random.default_rng(1)
        for _ in range(10):
            assert objective(link, random_theta(rng, n)) == pytest.approx(1.0)

    def test_nonnegative_finite(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            link = random_link(rng, k=3, n=4)
            val = objective(link, random_theta(rng, 4))
            assert np.isfinite(val) and val >= 0.0


class TestEuclideanGradient:
    def test_zero_without_cascade(self):
        rng = np.random.default_rng(3)
        link = random_link(rng, 2, 5)
        link = RisLink(a=np.zeros_like(link.a), b=link.b, sigma2=1.0)
        g = euclidean_gradient(link, random_theta(rng, 5))
        assert np.allclose(g, 0.0)

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(4)
        for _ in range(25):
            k = int(rng.integers(1, 4))
            n = int(rng.integers(2, 9))
            link = random_link(rng, k, n)
            theta = random_theta(rng, n)
            g = euclidean_gradient(link, theta)
            fd = fd_gradient(link, theta)
            assert np.linalg.norm(g - fd) / np.linalg.norm(fd) < 1e-5

    def test_single_user_analytic(self):
        rng = np.random.default_rng(5)
        n = 5
        link = random_link(rng, k=1, n=n, sigma2=0.7)
        theta = random_theta(rng, n)
        z = link.a[0, 0] @ theta.conj() + link.b[0, 0]
        expected = 2.0 * link.a[0, 0] * np.conj(z) / (np.abs(z) ** 2 + 0.7)
        assert np.allclose(euclidean_gradient(link, theta), expected)


class TestManifoldOps:
    def test_radial_gradient_projects_to_zero(self):
        rng = np.random.default_rng(6)
        theta = random_theta(rng, 6)
        assert np.allclose(riemannian_gradient(theta, theta), 0.0)

    def test_tangential_gradient_unchanged(self):
        rng = np.random.default_rng(7)
        theta = random_theta(rng, 6)
        assert np.allclose(riemannian_gradient(theta, 1j * theta), 1j * theta)

    def test_tangency_residual(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            theta = random_theta(rng, 8)
            egrad = rng.standard_normal(8) + 1j * rng.standard_normal(8)
            g = riemannian_gradient(theta, egrad)
            assert np.max(np.abs(np.real(g * theta.conj()))) < 1e-12

    def test_transport_keeps_tangent_vectors(self):
        rng = np.random.default_rng(9)
        theta = random_theta(rng, 6)
        eta = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        tangent = riemannian_gradient(theta, eta)  # already tangent at theta
        assert np.allclose(transport(theta, tangent), tangent)

    def test_transport_removes_radial(self):
        rng = np.random.default_rng(10)
        theta = random_theta(rng, 6)
        assert np.allclose(transport(theta, theta), 0.0)

    def test_transport_tangency(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            theta = random_theta(rng, 5)
            eta = rng.standard_normal(5) + 1j * rng.standard_normal(5)
            t = transport(theta, eta)
            assert np.max(np.abs(np.real(t * theta.conj()))) < 1e-12

    def test_retract_zero_step(self):
        rng = np.random.default_rng(12)
        theta = random_theta(rng, 4)
        eta = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        assert np.allclose(retract(theta, eta, 0.0), theta)

    def test_retract_unit_diagonal_case(self):
        out = retract(np.array([1.0 + 0j]), np.array([1j]), 1.0)
        assert out[0] == pytest.approx((1 + 1j) / np.sqrt(2))

    def test_retract_modulus(self):
        rng = np.random.default_rng(13)
        theta = random_theta(rng, 7)
        eta = rng.standard_normal(7) + 1j * rng.standard_normal(7)
        out = retract(theta, eta, 2.7)
        assert np.max(np.abs(np.abs(out) - 1.0)) < 1e-14


class TestSolveP3:
    def test_zero_cascade_returns_init(self):
        rng = np.random.default_rng(14)
        link = random_link(rng, 2, 5)
        link = RisLink(a=np.zeros_like(link.a), b=link.b, sigma2=1.0)
        theta0 = random_theta(rng, 5)
        sol = solve_p3(link, theta0)
        assert np.array_equal(sol.theta, theta0)
        assert sol.converged
        assert sol.iters == 0

    def test_phase_alignment_toy_vs_degree_grid(self):
        # single user, two elements, real data: optimum aligns every phase
        a = np.zeros((1, 1, 2), dtype=complex)
        a[0, 0] = [1.0, 1.0]
        link = RisLink(a=a, b=np.array([[1.0 + 0j]]), sigma2=1.0)
        rng = np.random.default_rng(15)
        sol = solve_p3(link, random_theta(rng, 2), max_iters=300, grad_tol=1e-10)
        angles = np.deg2rad(np.arange(360))
        t1, t2 = np.meshgrid(angles, angles, indexing="ij")
        z = np.exp(-1j * t1) + np.exp(-1j * t2) + 1.0
        grid_best = np.max(np.log2(1.0 + np.abs(z) ** 2))
        assert sol.trace[-1] >= grid_best - 1e-3
        # analytic optimum: all phases aligned at zero
        assert sol.trace[-1] == pytest.approx(np.log2(10.0), abs=1e-6)

    def test_beats_random_sampling(self):
        # seeded two-user instance: the landscape is multimodal in general,
        # so this is a fixed regression vector, not a for-all-draws claim
        rng = np.random.default_rng(16)
        link = random_link(rng, 2, 4)
        theta0 = random_theta(rng, 4)
        sol = solve_p3(link, theta0, max_iters=300, grad_tol=1e-9)
        assert sol.trace[-1] >= objective(link, theta0) - 1e-12
        best = max(objective(link, random_theta(rng, 4)) for _ in range(10_000))
        assert sol.trace[-1] >= best - 1e-6

    def test_trace_monotone_and_iterates_unit_modulus(self):
        rng = np.random.default_rng(17)
        for _ in range(10):
            link = random_link(rng, 3, 6)
            sol = solve_p3(link, random_theta(rng, 6), keep_iterates=True)
            assert np.all(np.diff(sol.trace) >= -1e-12)
            for it in sol.iterates:
                assert np.max(np.abs(np.abs(it) - 1.0)) <= 1e-12

    def test_global_phase_invariance_without_direct_link(self):
        rng = np.random.default_rng(18)
        link = random_link(rng, 2, 5)
        link = RisLink(a=link.a, b=np.zeros_like(link.b), sigma2=1.0)
        theta = random_theta(rng, 5)
        v1 = objective(link, theta)
        v2 = objective(link, np.exp(1j * 0.83) * theta)
        assert v1 == pytest.approx(v2, rel=1e-12)


class TestBuildRisLink:
    def test_definitions_against_loops(self):
        rng = np.random.default_rng(19)
        k, n_ris, n_t, n_rf = 3, 5, 4, 3
        h_d = rng.standard_normal((k, n_t)) + 1j * rng.standard_normal((k, n_t))
        h_r = rng.standard_normal((k, n_ris)) + 1j * rng.standard_normal((k, n_ris))
        g_r = rng.standard_normal((n_ris, n_t)) + 1j * rng.standard_normal((n_ris, n_t))
        m_v = rng.standard_normal((n_t, n_rf)) + 1j * rng.standard_normal((n_t, n_rf))
        f = rng.standard_normal((n_rf, k)) + 1j * rng.standard_normal((n_rf, k))
        link = build_ris_link(h_d, h_r, g_r, m_v, f, 1.0)
        for ku in range(k):
            cascade = np.diag(h_r[ku]) @ g_r
            for kp in range(k):
                assert np.allclose(link.a[kp, ku], cascade @ m_v @ f[:, kp])
                assert link.b[kp, ku] == pytest.approx(h_d[ku] @ m_v @ f[:, kp])

    def test_log2_reporting(self):
        rng = np.random.default_rng(20)
        link = random_link(rng, 2, 4)
        theta = random_theta(rng, 4)
        assert objective(link, theta) == pytest.approx(_objective_ln(link, theta) / LN2)
