import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from pinchlink.channel import (
    BsChannel,
    IncoherentPlacement,
    bs_scale,
    complex_gaussian,
    draw_waveguide_phases,
    joint_channel,
    joint_channel_from_phases,
    received_snr,
    sample_bs_channel,
    waveguide_channel,
    waveguide_channel_bruteforce,
    waveguide_gains,
)
from pinchlink.config import SystemConfig, eta, noise_power, wavelengths
from pinchlink.geometry import PlacementResult, Point3, align_fcd
from pinchlink.report import EXAMPLE_UE, EXAMPLE_WAVEGUIDES


def test_complex_gaussian_moments(rng):
    z = complex_gaussian(rng, 400_000)
    assert abs(z.mean()) < 5e-3
    assert np.mean(np.abs(z) ** 2) == pytest.approx(1.0, abs=5e-3)
    assert abs(np.mean(z**2)) < 5e-3  # circular symmetry
    assert np.var(z.real) == pytest.approx(0.5, abs=5e-3)


def test_bs_norm_squared_is_gamma(rng):
    n_b = 16
    h = complex_gaussian(rng, (50_000, n_b))
    g = np.sum(np.abs(h) ** 2, axis=1)
    assert stats.kstest(g, stats.gamma(a=n_b).cdf).pvalue > 0.01


def test_bs_channel_scale(cfg_c3e8, rng):
    bs = sample_bs_channel(cfg_c3e8, rng)
    assert bs.n_antennas == 64
    assert bs.scale**2 == pytest.approx(eta(cfg_c3e8) / 200**2.4, rel=1e-12)
    assert np.allclose(bs.vector, bs.scale * bs.coefficients)
    with pytest.raises(ValueError):
        BsChannel(np.array([np.nan]), 1.0)


def test_waveguide_port_magnitude(cfg_c3e8):
    assert waveguide_gains(cfg_c3e8)[0] == pytest.approx(math.sqrt(eta(cfg_c3e8) * 8 / 1e4), rel=1e-12)
    assert waveguide_gains(cfg_c3e8)[0] == pytest.approx(1.929e-4, rel=1e-3)


def test_port_model_matches_per_antenna_sum():
    cfg = SystemConfig(K=2, N_G=8)
    for res in align_fcd(EXAMPLE_WAVEGUIDES, EXAMPLE_UE, cfg):
        d = float(np.linalg.norm(np.subtract(res.reference, EXAMPLE_UE)))
        closed = waveguide_channel(res, d, cfg)
        brute = waveguide_channel_bruteforce(res, d, cfg)
        assert abs(closed - brute) <= 1e-6 * abs(closed)
        assert abs(closed) == pytest.approx(math.sqrt(eta(cfg) * 8 / d**2), rel=1e-12)


def test_incoherent_placement_rejected():
    bad = PlacementResult(
        positions=(Point3(0, 0, 0), Point3(1, 0, 0)),
        phase_anchor=0.0,
        integer_offsets=(0, 1),
        phases=(0.0, 2 * math.pi + 0.1),
    )
    with pytest.raises(IncoherentPlacement):
        waveguide_channel(bad, 10.0, SystemConfig())


def test_phase_draw_modes(cfg_c3e8, rng):
    phases, dist = draw_waveguide_phases(cfg_c3e8, rng, 100_000, "uniform")
    assert phases.shape == dist.shape == (100_000, 4)
    assert np.all(dist == 100.0)
    assert stats.kstest(phases[:, 0] / (2 * math.pi), "uniform").pvalue > 0.01
    lam, _ = wavelengths(cfg_c3e8)
    phases, dist = draw_waveguide_phases(cfg_c3e8, rng, 100_000, "jitter")
    assert np.all(np.abs(dist - 100.0) <= lam / 2)
    assert stats.kstest(phases[:, 1] / (2 * math.pi), "uniform").pvalue > 0.01
    with pytest.raises(ValueError):
        draw_waveguide_phases(cfg_c3e8, rng, 3, "bogus")


def test_joint_channel_layout(cfg_c3e8, rng):
    bs = sample_bs_channel(cfg_c3e8, rng)
    gains = waveguide_gains(cfg_c3e8)
    phi = np.array([0.1, 1.0, 2.0, 3.0])
    h = joint_channel_from_phases(bs, gains, phi, cfg_c3e8)
    assert h.vector.shape == (68,) and h.n_bs == 64 and h.n_waveguides == 4
    assert np.allclose(h.vector[:64], bs.vector)
    assert np.allclose(h.vector[64:], gains * np.exp(-1j * phi))
    assert np.allclose(h.waveguide_phases, phi)
    assert h.norm**2 == pytest.approx(
        np.sum(np.abs(bs.vector) ** 2) + np.sum(gains**2), rel=1e-12
    )
    with pytest.raises(ValueError):
        joint_channel(bs, [1.0], cfg_c3e8)


def test_received_snr_cases(cfg_c3e8, rng):
    bs = sample_bs_channel(cfg_c3e8, rng)
    h = joint_channel_from_phases(bs, waveguide_gains(cfg_c3e8), np.zeros(4), cfg_c3e8)
    mrt = np.conj(h.vector) / h.norm
    assert received_snr(h, mrt, cfg_c3e8) == pytest.approx(h.norm**2 / noise_power(cfg_c3e8), rel=1e-12)
    # orthogonal beamformer gives zero
    v = np.zeros(68, complex)
    v[0], v[1] = h.vector[1], -h.vector[0]
    v = v / np.linalg.norm(v)
    assert received_snr(h, v, cfg_c3e8) == pytest.approx(0.0, abs=1e-12 * h.norm**2 / noise_power(cfg_c3e8))
    with pytest.raises(ValueError):
        received_snr(h, 2 * mrt, cfg_c3e8)
    with pytest.raises(ValueError):
        received_snr(h, mrt[:10] / np.linalg.norm(mrt[:10]), cfg_c3e8)


@settings(max_examples=30)
@given(theta=st.floats(0, 2 * math.pi), seed=st.integers(0, 2**31))
def test_received_snr_global_phase_invariant(theta, seed):
    cfg = SystemConfig(N_B=8, K=2)
    bs = sample_bs_channel(cfg, np.random.default_rng(seed))
    h = joint_channel_from_phases(bs, waveguide_gains(cfg), [0.3, 1.7], cfg)
    w = np.conj(h.vector) / h.norm
    a = received_snr(h, w, cfg)
    b = received_snr(h, w * np.exp(1j * theta), cfg)
    assert b == pytest.approx(a, rel=1e-10)


def test_bs_scale_positive(cfg_c3e8):
    assert bs_scale(cfg_c3e8) > 0
