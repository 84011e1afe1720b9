"""Independent reference computations used by the tests.

Nothing here calls the placement solvers; phases are recomputed from raw
coordinates and roots are located by brute-force scanning.
"""

import math

import numpy as np

from pinchlink.config import SystemConfig, wavelengths
from pinchlink.geometry import (
    PHASE_TOL,
    Point3,
    WaveguideSpec,
    align_fcd,
    align_scd,
    phase_distance,
)

TWO_PI = 2 * math.pi
CFG = SystemConfig(K=2, N_G=4)
LAM, LAM_G = wavelengths(CFG)
SCAN_STEP = LAM_G / 1000


def raw_phase(points, feed, ue, c, f_c, n_eff):
    lam = c / f_c
    lam_g = lam / n_eff
    points = np.atleast_2d(points)
    free = np.sqrt(((points - np.asarray(ue)) ** 2).sum(axis=1))
    guided = np.sqrt(((points - np.asarray(feed)) ** 2).sum(axis=1))
    return TWO_PI * free / lam + TWO_PI * guided / lam_g


def wrapped(x):
    return (np.asarray(x) + math.pi) % TWO_PI - math.pi


def scan_roots(feed, direction, ue, target, cfg, t_lo, t_hi, step):
    """Axial coordinates in [t_lo, t_hi] where phase == target (mod 2 pi).

    Sign changes of the wrapped error are accepted only when both samples are
    small (rejects the +-pi wrap jump); the root is linearly interpolated.
    """
    feed = np.asarray(feed, float)
    d = np.asarray(direction, float)
    d = d / np.linalg.norm(d)
    ts = np.arange(t_lo, t_hi + step / 2, step)
    pts = feed + ts[:, None] * d
    err = wrapped(raw_phase(pts, feed, ue, cfg.c, cfg.f_c, cfg.n_eff) - target)
    a, b = err[:-1], err[1:]
    hit = (np.sign(a) != np.sign(b)) & (np.abs(a) < 1.0) & (np.abs(b) < 1.0)
    idx = np.nonzero(hit)[0]
    frac = a[idx] / (a[idx] - b[idx])
    return ts[idx] + frac * step


def nearest_root(roots, t0):
    """Nearest root to t0, ties to the right (larger t)."""
    roots = np.asarray(roots)
    left = roots[roots <= t0]
    right = roots[roots >= t0]
    if len(left) == 0:
        return right.min()
    if len(right) == 0:
        return left.max()
    l, r = left.max(), right.min()
    return r if abs(l - t0) >= abs(r - t0) else l


def simplex_search_best(p, n, rng):
    w = rng.dirichlet(np.ones(len(p)), n)
    return float((np.sqrt(p * w).sum(axis=1) ** 2).max())


def closed_form_snrs(c, f_c, n_b, k, n_g, alpha, beta, l_b, l_g, p_t=1.0, n0_dbm_hz=-170.0, bw=100e6):
    """Average SNRs (linear) of BS-only, SD, SCD, FCD in plain scalar arithmetic."""
    eta = (c / f_c / (4 * math.pi)) ** 2
    snr0 = p_t / (10 ** ((n0_dbm_hz - 30) / 10) * bw)
    bs = eta / l_b**alpha
    wg = eta / l_g**beta
    return {
        "bs_only": n_b * bs * snr0,
        "sd": (n_b * n_b * bs + n_g * k * wg) / (n_b + k) * snr0,
        "scd": (n_b * n_b * bs + n_g * k * k * wg) / (n_b + k) * snr0,
        "fcd": (n_b * bs + n_g * k * wg) * snr0,
    }


def random_scene(rng, k=2):
    """Random straight waveguides with the UE kept a few meters off every axis."""
    wgs = []
    ue = rng.uniform(-20, 20, 3)
    for _ in range(k):
        d = rng.normal(size=3)
        d /= np.linalg.norm(d)
        while True:
            feed = ue + rng.uniform(-25, 25, 3)
            v = ue - feed
            if np.linalg.norm(v - v.dot(d) * d) > 2.0:
                break
        t_ref = rng.uniform(2.0, 10.0)
        wgs.append(
            WaveguideSpec(
                feed=Point3.of(feed),
                reference_position=Point3.of(feed + t_ref * d),
                axis_direction=Point3.of(d),
                length_limit=40.0,
            )
        )
    return wgs, Point3.of(ue)


def _oracle_reference(wg, ue, target):
    t0 = wg.reference_offset
    roots = scan_roots(wg.feed, wg.axis_direction, ue, target, CFG, max(0.0, t0 - 0.5), t0 + 0.5, SCAN_STEP)
    return nearest_root(roots, t0)


def _oracle_chain(wg_ref, ue, anchor, n):
    t0 = wg_ref.reference_offset
    roots = scan_roots(wg_ref.feed, wg_ref.axis_direction, ue, anchor, CFG, t0, t0 + 0.3 * n, SCAN_STEP)
    roots = roots[roots > t0 + SCAN_STEP / 2]
    return roots[: n - 1]


def check_against_oracle(wgs, ue):
    scd = align_scd(wgs, ue, CFG)
    fcd = align_fcd(wgs, ue, CFG)
    for res in [*scd, *fcd]:
        assert res.max_congruence_error() <= PHASE_TOL
        # independent recomputation of every antenna's phase
        wg = next(w for w in wgs if np.allclose(np.cross(np.subtract(res.reference, w.feed), w.axis_direction), 0, atol=1e-6))
        raw = raw_phase(np.array(res.positions), wg.feed, ue, CFG.c, CFG.f_c, CFG.n_eff)
        assert np.max(phase_distance(raw, res.phase_anchor)) <= PHASE_TOL
    targets = [scd[0].phase_anchor] * len(wgs)
    for i, (wg, res) in enumerate(zip(wgs, scd)):
        if i == 0:
            assert np.allclose(res.reference, wg.reference_position, atol=1e-12)
            continue
        t_expected = _oracle_reference(wg, ue, targets[i])
        assert abs(wg.axial(res.reference) - t_expected) <= SCAN_STEP
    for wg, res in zip(wgs, fcd):
        t_expected = _oracle_reference(wg, ue, 0.0)
        assert abs(wg.axial(res.reference) - t_expected) <= SCAN_STEP
        chain = _oracle_chain(wg.with_reference(res.reference), ue, res.phase_anchor, res.n_antennas)
        got = np.array([wg.axial(p) for p in res.positions[1:]])
        assert len(chain) == len(got)
        assert np.max(np.abs(got - chain)) <= SCAN_STEP
