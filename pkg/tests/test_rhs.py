import numpy as np
import pytest

from holobeam.config import paper_default
from holobeam.rhs import (
    RhsGeometry,
    assemble_m_v,
    build_geometry,
    build_v,
    coupling_matrix,
    element_grid,
    feed_layout,
    holographic_pattern,
    uniform_beam_weights,
)

LAM = 0.0107
GAMMA = 1.732


class TestBuildV:
    def test_colocated_feed(self):
        v = build_v(np.array([[0.0, 0.0]]), np.array([[0.0, 0.0]]), GAMMA, LAM)
        assert v[0, 0] == pytest.approx(1.0 + 0.0j)

    def test_half_guided_wavelength(self):
        dist = LAM / (2.0 * GAMMA)
        v = build_v(np.array([[dist, 0.0]]), np.array([[0.0, 0.0]]), GAMMA, LAM)
        assert v[0, 0] == pytest.approx(-1.0 + 0.0j, abs=1e-12)

    def test_unimodular(self):
        rng = np.random.default_rng(0)
        elements = rng.uniform(0, 0.05, (20, 2))
        feeds = rng.uniform(0, 0.05, (4, 2))
        v = build_v(elements, feeds, GAMMA, LAM)
        assert np.allclose(np.abs(v), 1.0, atol=1e-14)


class TestCouplingMatrix:
    def test_single_element(self):
        c = coupling_matrix(np.array([[0.0, 0.0]]), LAM, True)
        assert np.allclose(c, [[1.0]])

    def test_half_wavelength_pair(self):
        positions = np.array([[0.0, 0.0], [LAM / 2, 0.0]])
        c = coupling_matrix(positions, LAM, True)
        assert np.max(np.abs(c - np.eye(2))) < 1e-10

    def test_quarter_wavelength_pair(self):
        positions = np.array([[0.0, 0.0], [LAM / 4, 0.0]])
        c = coupling_matrix(positions, LAM, True)
        d = np.array([[1.0, 2 / np.pi], [2 / np.pi, 1.0]])
        assert np.max(np.abs(c @ c @ d - np.eye(2))) < 1e-9

    def test_disabled_exact_identity(self):
        positions = np.array([[0.0, 0.0], [LAM / 8, 0.0]])
        c = coupling_matrix(positions, LAM, False)
        assert np.array_equal(c, np.eye(2, dtype=complex))

    def test_half_wavelength_ula_identity(self):
        positions = element_grid(8, 1, LAM / 2)
        c = coupling_matrix(positions, LAM, True)
        assert np.max(np.abs(c - np.eye(8))) < 1e-10

    def test_reference_surface_spectrum_bounded(self):
        # quarter-wavelength 8x8 grid: the floored spectrum keeps the
        # amplification of the weakest mode physical
        positions = element_grid(8, 8, LAM / 4)
        c = coupling_matrix(positions, LAM, True)
        svals = np.linalg.svd(c, compute_uv=False)
        assert svals.max() < 1e3
        assert np.max(np.abs(c - c.conj().T)) < 1e-12


class TestGeometry:
    def test_shapes_and_invariants(self):
        cfg = paper_default()
        geom = build_geometry(cfg)
        assert geom.element_positions.shape == (64, 2)
        assert geom.feed_positions.shape == (8, 2)
        assert geom.v.shape == (64, 8)
        assert np.allclose(np.abs(geom.v), 1.0)
        assert np.array_equal(geom.c, np.eye(64, dtype=complex))

    def test_grid_pitch(self):
        grid = element_grid(3, 2, 0.5)
        assert grid.shape == (6, 2)
        # row-major: consecutive entries advance along y, then x wraps
        assert np.allclose(grid[1] - grid[0], [0.0, 0.5])
        assert np.allclose(grid[2] - grid[0], [0.5, 0.0])
        assert np.allclose(grid[5], [1.0, 0.5])

    def test_feeds_span_long_axis(self):
        feeds = feed_layout(8, 4, 0.1, 4)
        assert feeds.shape == (4, 2)
        assert np.all(np.diff(feeds[:, 0]) > 0)  # spread along x (long axis)
        assert np.allclose(feeds[:, 1], 0.15)  # centered on the short axis


def toy_geometry(positions, v):
    positions = np.asarray(positions, dtype=float)
    v = np.asarray(v, dtype=complex)
    return RhsGeometry(
        element_positions=positions,
        feed_positions=np.zeros((v.shape[1], 2)),
        v=v,
        c=np.eye(positions.shape[0], dtype=complex),
        refractive_index=GAMMA,
        wavelength=LAM,
        coupling_enabled=False,
    )


class TestHolographicPattern:
    def test_in_phase_element_fully_on(self):
        # element at the origin: object wave phase 0, reference wave phase 0
        geom = toy_geometry([[0.0, 0.0]], [[1.0]])
        m = holographic_pattern(geom, [(0.3, 0.4)], np.array([[1.0]]))
        assert m[0] == pytest.approx(1.0)

    def test_opposite_phase_element_off(self):
        # reference wave arrives inverted: interference real part is -1
        geom = toy_geometry([[0.0, 0.0]], [[-1.0]])
        m = holographic_pattern(geom, [(0.3, 0.4)], np.array([[1.0]]))
        assert m[0] == pytest.approx(0.0)

    def test_two_beam_equal_weights(self):
        # single element, single feed; choose directions whose single-beam
        # amplitudes are 0.2 and 0.8, equal weights combine to 0.5
        lam = LAM
        x = lam / (2 * np.pi) * np.arccos(-0.6)  # k0 * x = acos(-0.6)
        geom = toy_geometry([[x, 0.0]], [[1.0]])
        az2 = np.arcsin(np.arccos(0.6) / np.arccos(-0.6))
        directions = [(np.pi / 2, np.pi / 2), (az2, np.pi / 2)]
        single0 = holographic_pattern(geom, [directions[0]], np.array([[1.0]]))
        single1 = holographic_pattern(geom, [directions[1]], np.array([[1.0]]))
        assert single0[0] == pytest.approx(0.2, abs=1e-12)
        assert single1[0] == pytest.approx(0.8, abs=1e-12)
        combined = holographic_pattern(geom, directions, np.full((2, 1), 0.5))
        assert combined[0] == pytest.approx(0.5, abs=1e-12)

    def test_range_property(self):
        cfg = paper_default()
        geom = build_geometry(cfg)
        rng = np.random.default_rng(4)
        for _ in range(20):
            k = int(rng.integers(1, 5))
            directions = [
                (rng.uniform(0, 2 * np.pi), rng.uniform(0, np.pi / 2)) for _ in range(k)
            ]
            w = rng.uniform(0, 1, (k, cfg.n_rf))
            w /= w.sum()
            m = holographic_pattern(geom, directions, w)
            assert np.all(m >= 0.0) and np.all(m <= 1.0)

    def test_invalid_weights(self):
        geom = toy_geometry([[0.0, 0.0]], [[1.0]])
        with pytest.raises(ValueError):
            holographic_pattern(geom, [(0.0, 0.0)], np.array([[0.7]]))

    def test_uniform_weights(self):
        w = uniform_beam_weights(4, 8)
        assert w.shape == (4, 8)
        assert w.sum() == pytest.approx(1.0)


class TestAssembleMV:
    def test_identity_amplitudes(self):
        v = np.exp(1j * np.arange(6).reshape(3, 2))
        out = assemble_m_v(np.eye(3, dtype=complex), np.ones(3), v)
        assert np.allclose(out, v)

    def test_zero_amplitudes(self):
        v = np.exp(1j * np.arange(6).reshape(3, 2))
        assert np.allclose(assemble_m_v(np.eye(3, dtype=complex), np.zeros(3), v), 0.0)

    def test_against_triple_loop(self):
        rng = np.random.default_rng(6)
        n, q = 5, 3
        c = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        m = rng.uniform(0, 1, n)
        v = np.exp(1j * rng.uniform(0, 2 * np.pi, (n, q)))
        out = assemble_m_v(c, m, v)
        brute = np.zeros((n, q), dtype=complex)
        for i in range(n):
            for j in range(q):
                for k in range(n):
                    brute[i, j] += c[i, k] * m[k] * v[k, j]
        assert np.max(np.abs(out - brute)) < 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            assemble_m_v(np.eye(3, dtype=complex), np.ones(2), np.ones((3, 2)))
