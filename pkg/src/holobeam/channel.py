"""Geometric multipath channel generation and effective-channel assembly.

Channels follow a clustered-ray (Saleh-Valenzuela style) model: each link is a
sqrt(N/L)-scaled sum of L planar-wave paths with complex gains drawn from the
distance-dependent path-loss law. Direct BS->UE paths are all NLOS and carry
an extra penetration loss; the first BS->RIS and RIS->UE path is LOS.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# mmWave path-loss constants (28 GHz urban measurements): PL = a + 10 b log10(d) + kappa
PATHLOSS_LOS = (61.4, 2.0, 5.8)   # intercept a [dB], exponent b, shadowing std [dB]
PATHLOSS_NLOS = (72.0, 2.92, 8.7)


@dataclass(frozen=True)
class LinkPaths:
    """Per-path draw for one link: complex gains and departure/arrival angles.

    Arrays share a leading shape (either (L,) for the BS->RIS matrix or
    (K, L) for the per-user links). Arrival angles are unused for the
    single-antenna UE links and stored as zeros there.
    """

    gains: np.ndarray
    aod_azimuth: np.ndarray
    aod_elevation: np.ndarray
    aoa_azimuth: np.ndarray
    aoa_elevation: np.ndarray


@dataclass(frozen=True)
class ChannelSet:
    """One realization of the three channels plus their path metadata."""

    h_d: np.ndarray   # (K, N_t) rows are h_d,k^H
    h_r: np.ndarray   # (K, N_RIS) rows are h_R,k^H
    g_r: np.ndarray   # (N_RIS, N_t)
    paths_direct: LinkPaths
    paths_ris_ue: LinkPaths
    paths_bs_ris: LinkPaths


def array_response(n_x, n_y, spacing_wavelengths, azimuth, elevation):
    """Unit-norm UPA response for direction (azimuth, elevation).

    Element (nx, ny) sits at (nx d, ny d) with d = spacing_wavelengths * lambda
    and contributes phase (2 pi / lambda) d (nx sin(az) sin(el) + ny cos(el)).
    Elements are enumerated row-major (ny fastest). For a 1x1 array this is
    the scalar 1.
    """
    phase_x = 2.0 * np.pi * spacing_wavelengths * np.sin(azimuth) * np.sin(elevation)
    phase_y = 2.0 * np.pi * spacing_wavelengths * np.cos(elevation)
    ax = np.exp(1j * phase_x * np.arange(n_x))
    ay = np.exp(1j * phase_y * np.arange(n_y))
    return np.kron(ax, ay) / np.sqrt(n_x * n_y)


def path_loss_db(dist_m, link, shadowing_db=0.0):
    """Distance path loss in dB for link class "los" or "nlos".

    The shadowing term is supplied by the caller (a seeded draw, or 0 for
    deterministic tests) so the function itself stays pure.
    """
    if link == "los":
        a, b, _ = PATHLOSS_LOS
    elif link == "nlos":
        a, b, _ = PATHLOSS_NLOS
    else:
        raise ValueError(f"unknown link class {link!r}")
    return a + 10.0 * b * np.log10(dist_m) + shadowing_db


def _draw_link(rng, n_paths, dist_m, first_path_los, extra_loss_db, shadowing):
    """Gains and angles for one link, in a fixed draw order for determinism."""
    sigma = np.full(n_paths, PATHLOSS_NLOS[2])
    if first_path_los:
        sigma[0] = PATHLOSS_LOS[2]
    kappa = rng.standard_normal(n_paths) * sigma if shadowing else np.zeros(n_paths)
    pl = np.array(
        [
            path_loss_db(
                dist_m,
                "los" if (first_path_los and l == 0) else "nlos",
                kappa[l],
            )
            + extra_loss_db
            for l in range(n_paths)
        ]
    )
    std = np.sqrt(10.0 ** (-0.1 * pl) / 2.0)
    gains = std * (rng.standard_normal(n_paths) + 1j * rng.standard_normal(n_paths))
    aod_az = rng.uniform(0.0, 2.0 * np.pi, size=n_paths)
    aod_el = rng.uniform(0.0, np.pi / 2.0, size=n_paths)
    aoa_az = rng.uniform(0.0, 2.0 * np.pi, size=n_paths)
    aoa_el = rng.uniform(0.0, np.pi / 2.0, size=n_paths)
    return gains, aod_az, aod_el, aoa_az, aoa_el


def generate_channels(cfg, rng, shadowing=True):
    """Draw one realization of (H_d, H_R, G_R) from cfg geometry and rng.

    Pure function of (cfg, rng state): two calls on identically seeded
    generators return bitwise-identical sets. Set shadowing=False to pin
    kappa = 0 per path (unit tests).
    """
    bs = np.asarray(cfg.bs_pos)
    ris = np.asarray(cfg.ris_pos)
    ues = np.asarray(cfg.ue_positions)
    offset = cfg.link_budget_offset_db

    # Direct BS -> UE rows: every path NLOS plus blockage penetration loss.
    h_d = np.zeros((cfg.k_users, cfg.n_t), dtype=complex)
    d_meta = [np.zeros((cfg.k_users, cfg.paths_direct)) for _ in range(4)]
    d_gains = np.zeros((cfg.k_users, cfg.paths_direct), dtype=complex)
    for k in range(cfg.k_users):
        dist = float(np.linalg.norm(ues[k] - bs))
        gains, aod_az, aod_el, aoa_az, aoa_el = _draw_link(
            rng, cfg.paths_direct, dist, False, cfg.penetration_loss_db + offset, shadowing
        )
        row = np.zeros(cfg.n_t, dtype=complex)
        for l in range(cfg.paths_direct):
            a_t = array_response(
                cfg.n_t_x, cfg.n_t_y, cfg.rhs_spacing_wavelengths, aod_az[l], aod_el[l]
            )
            row += gains[l] * a_t.conj()  # UE-side response is the scalar 1
        h_d[k] = np.sqrt(cfg.n_t / cfg.paths_direct) * row
        d_gains[k] = gains
        for arr, vals in zip(d_meta, (aod_az, aod_el, aoa_az, aoa_el)):
            arr[k] = vals
    paths_direct = LinkPaths(d_gains, *d_meta)

    # RIS -> UE rows: first path LOS.
    h_r = np.zeros((cfg.k_users, cfg.n_ris), dtype=complex)
    r_meta = [np.zeros((cfg.k_users, cfg.paths_ris_ue)) for _ in range(4)]
    r_gains = np.zeros((cfg.k_users, cfg.paths_ris_ue), dtype=complex)
    for k in range(cfg.k_users):
        dist = float(np.linalg.norm(ues[k] - ris))
        gains, aod_az, aod_el, aoa_az, aoa_el = _draw_link(
            rng, cfg.paths_ris_ue, dist, True, offset, shadowing
        )
        row = np.zeros(cfg.n_ris, dtype=complex)
        for l in range(cfg.paths_ris_ue):
            a_t = array_response(
                cfg.n_ris_x, cfg.n_ris_y, cfg.ris_spacing_wavelengths, aod_az[l], aod_el[l]
            )
            row += gains[l] * a_t.conj()
        h_r[k] = np.sqrt(cfg.n_ris / cfg.paths_ris_ue) * row
        r_gains[k] = gains
        for arr, vals in zip(r_meta, (aod_az, aod_el, aoa_az, aoa_el)):
            arr[k] = vals
    paths_ris_ue = LinkPaths(r_gains, *r_meta)

    # BS -> RIS matrix: first path LOS, UPA response on both sides.
    dist = float(np.linalg.norm(ris - bs))
    gains, aod_az, aod_el, aoa_az, aoa_el = _draw_link(
        rng, cfg.paths_bs_ris, dist, True, offset, shadowing
    )
    g_r = np.zeros((cfg.n_ris, cfg.n_t), dtype=complex)
    for l in range(cfg.paths_bs_ris):
        a_r = array_response(
            cfg.n_ris_x, cfg.n_ris_y, cfg.ris_spacing_wavelengths, aoa_az[l], aoa_el[l]
        )
        a_t = array_response(
            cfg.n_t_x, cfg.n_t_y, cfg.rhs_spacing_wavelengths, aod_az[l], aod_el[l]
        )
        g_r += gains[l] * np.outer(a_r, a_t.conj())
    g_r *= np.sqrt(cfg.n_ris * cfg.n_t / cfg.paths_bs_ris)
    paths_bs_ris = LinkPaths(gains, aod_az, aod_el, aoa_az, aoa_el)

    return ChannelSet(h_d, h_r, g_r, paths_direct, paths_ris_ue, paths_bs_ris)


def assemble_h_tot(ch, theta):
    """Effective channel H_d + H_R diag(theta) G_R for unit-modulus theta."""
    theta = np.asarray(theta)
    if ch.h_r.shape[1] != theta.shape[0] or ch.g_r.shape[0] != theta.shape[0]:
        raise ValueError("incompatible channel dimensions")
    return ch.h_d + (ch.h_r * theta) @ ch.g_r


def perturb_csi(ch, radius_factor, rng):
    """Estimation-error model: each per-user row h is replaced by h + delta
    with ||delta|| = u * radius_factor * ||h||, u uniform in [0, 1] and delta
    isotropic. The returned set is what the optimizer sees; the caller keeps
    the true set for rate evaluation. The shared BS->RIS matrix is untouched.
    """
    if radius_factor == 0.0:
        return ch

    def perturb_rows(mat):
        out = mat.copy()
        for k in range(mat.shape[0]):
            delta = rng.standard_normal(mat.shape[1]) + 1j * rng.standard_normal(
                mat.shape[1]
            )
            norm = np.linalg.norm(delta)
            if norm == 0.0:
                continue
            target = rng.uniform(0.0, 1.0) * radius_factor * np.linalg.norm(mat[k])
            out[k] = mat[k] + delta * (target / norm)
        return out

    return ChannelSet(
        perturb_rows(ch.h_d),
        perturb_rows(ch.h_r),
        ch.g_r,
        ch.paths_direct,
        ch.paths_ris_ue,
        ch.paths_bs_ris,
    )


def dump_channels(ch, path):
    """Write the three matrices as CSV rows (matrix, row, col, re, im) for
    cross-implementation regression."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("matrix,row,col,re,im\n")
        for name, mat in (("h_d", ch.h_d), ("h_r", ch.h_r), ("g_r", ch.g_r)):
            for (i, j), value in np.ndenumerate(mat):
                fh.write(f"{name},{i},{j},{float(value.real)!r},{float(value.imag)!r}\n")
