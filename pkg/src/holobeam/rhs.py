"""Holographic surface model: element/feed layout, fixed phase matrix V,
mutual-coupling matrix C, interference-principle amplitudes, and the
assembled response M_v = C diag(m) V."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import inv_sqrt_hermitian, sinc_norm


@dataclass(frozen=True)
class RhsGeometry:
    """Immutable surface description shared by every solver.

    element_positions: (N_t, 2) on-surface coordinates in meters, row-major
    grid with pitch rhs_spacing_wavelengths * lambda. feed_positions:
    (N_RF, 2) in the same plane, spread uniformly along the long axis at the
    surface centerline. v is the N_t x N_RF unimodular waveguide phase matrix
    and c the N_t x N_t coupling matrix (identity when coupling is disabled).
    """

    element_positions: np.ndarray
    feed_positions: np.ndarray
    v: np.ndarray
    c: np.ndarray
    refractive_index: float
    wavelength: float
    coupling_enabled: bool


def element_grid(n_x, n_y, pitch_m):
    """Row-major (n_y fastest) grid of element coordinates, matching the
    enumeration order of the array response."""
    xs, ys = np.meshgrid(np.arange(n_x), np.arange(n_y), indexing="ij")
    return np.column_stack([xs.ravel(), ys.ravel()]) * pitch_m


def feed_layout(n_x, n_y, pitch_m, n_rf):
    """N_RF feed coordinates on the surface plane.

    Feeds sit on the centerline of the short axis and divide the long axis
    into n_rf equal segments (one feed per segment midpoint).
    """
    extent_x = (n_x - 1) * pitch_m
    extent_y = (n_y - 1) * pitch_m
    long_extent, short_mid, along_x = (
        (extent_x, extent_y / 2.0, True)
        if extent_x >= extent_y
        else (extent_y, extent_x / 2.0, False)
    )
    marks = (np.arange(n_rf) + 0.5) / n_rf * long_extent
    if along_x:
        return np.column_stack([marks, np.full(n_rf, short_mid)])
    return np.column_stack([np.full(n_rf, short_mid), marks])


def build_v(element_positions, feed_positions, refractive_index, wavelength):
    """Waveguide phase matrix V(p, q) = exp(-j 2 pi gamma D_pq / lambda).

    D_pq is the element-to-feed distance. The exponent carries the imaginary
    unit: the reference wave accrues phase along the lossless waveguide, so
    every entry is unimodular.
    """
    dists = np.linalg.norm(
        element_positions[:, None, :] - feed_positions[None, :, :], axis=2
    )
    return np.exp(-2j * np.pi * refractive_index * dists / wavelength)


# Relative floor for the sinc-kernel spectrum. Sub-wavelength 2D grids drive
# the kernel's weakest eigenvalues toward zero (2.8e-11 at quarter-wavelength
# pitch on 8x8), and the raw inverse square root would then amplify those
# super-directive modes by ~1e5, which no passive array does. Eigenvalues are
# floored at this fraction of the largest before inversion.
COUPLING_SPECTRUM_FLOOR = 1e-2


def coupling_matrix(element_positions, wavelength, enabled):
    """Mutual-coupling matrix C for isotropic elements.

    Disabled: identity. Enabled: C = D^(-1/2) with D built from the sinc
    kernel sinc(2 ||t_n' - t_n|| / lambda) (unit diagonal; exactly identity
    again at half-wavelength pitch where the sinc zeros land). The kernel
    spectrum is floored at COUPLING_SPECTRUM_FLOOR of its largest eigenvalue
    so that dense grids stay physically meaningful.
    """
    n = element_positions.shape[0]
    if not enabled:
        return np.eye(n, dtype=complex)
    dists = np.linalg.norm(
        element_positions[:, None, :] - element_positions[None, :, :], axis=2
    )
    d = sinc_norm(2.0 * dists / wavelength).astype(complex)
    eigvals, eigvecs = np.linalg.eigh(d)
    if eigvals[-1] <= 0:
        return inv_sqrt_hermitian(d)  # defer to the strict error path
    floored = np.maximum(eigvals, COUPLING_SPECTRUM_FLOOR * eigvals[-1])
    d = (eigvecs * floored) @ eigvecs.conj().T
    return inv_sqrt_hermitian(d)


def build_geometry(cfg) -> RhsGeometry:
    """Assemble the full surface description for a scenario."""
    pitch = cfg.rhs_spacing_wavelengths * cfg.wavelength
    elements = element_grid(cfg.n_t_x, cfg.n_t_y, pitch)
    feeds = feed_layout(cfg.n_t_x, cfg.n_t_y, pitch, cfg.n_rf)
    v = build_v(elements, feeds, cfg.refractive_index, cfg.wavelength)
    c = coupling_matrix(elements, cfg.wavelength, cfg.coupling_enabled)
    return RhsGeometry(
        elements, feeds, v, c, cfg.refractive_index, cfg.wavelength, cfg.coupling_enabled
    )


def holographic_pattern(geom, directions, weights):
    """Interference-principle amplitude vector for K beam directions.

    For beam (az, el) and feed q the object wave at element p is
    exp(-j k_f . r_p) with |k_f| = 2 pi / lambda resolved on the surface as
    (2 pi / lambda)(r_x sin(az) sin(el) + r_y cos(el)); the reference wave is
    the waveguide phase geom.v[p, q]. The single-beam amplitude is
    (Re[obj * conj(ref)] + 1) / 2 and the multi-beam amplitude is the
    weights-weighted sum, so entries stay in [0, 1] whenever the (K, N_RF)
    weights are non-negative and sum to 1.
    """
    weights = np.asarray(weights, dtype=float)
    if weights.ndim != 2 or weights.shape[0] != len(directions):
        raise ValueError("weights must be K x N_RF")
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-9:
        raise ValueError("weights must be non-negative and sum to 1")
    rx = geom.element_positions[:, 0]
    ry = geom.element_positions[:, 1]
    k0 = 2.0 * np.pi / geom.wavelength
    m = np.zeros(geom.element_positions.shape[0])
    for k, (azimuth, elevation) in enumerate(directions):
        obj = np.exp(
            -1j * k0 * (rx * np.sin(azimuth) * np.sin(elevation) + ry * np.cos(elevation))
        )
        intf = obj[:, None] * geom.v.conj()
        single = (intf.real + 1.0) / 2.0
        m += single @ weights[k]
    return m


def uniform_beam_weights(k_users, n_rf):
    """Default equal split a_{k,q} = 1 / (K N_RF)."""
    return np.full((k_users, n_rf), 1.0 / (k_users * n_rf))


def assemble_m_v(c, m, v):
    """Surface response M_v = C diag(m) V for amplitudes m in [0, 1]."""
    m = np.asarray(m, dtype=float)
    if c.shape[1] != m.shape[0] or v.shape[0] != m.shape[0]:
        raise ValueError("incompatible RHS dimensions")
    return c @ (m[:, None] * v)
