"""BS Rayleigh channel, waveguide RF-port channels and the joint MISO vector.

Layout of the joint channel vector (length ``N_B + K``)::

    [ sqrt(eta/L_B^alpha) * h_tilde_B (N_B entries),
      sqrt(eta N_G / L_{G,k}^beta) * exp(-j phi_k) for k = 1..K ]
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import SystemConfig, eta, noise_power, wavelengths
from .geometry import PHASE_TOL, TWO_PI, PlacementResult

UNIT_NORM_TOL = 1e-9


class IncoherentPlacement(ValueError):
    """Antenna phases on a waveguide are not congruent, so the port model fails."""


def bs_scale(cfg: SystemConfig) -> float:
    return float(np.sqrt(eta(cfg) / cfg.L_B**cfg.alpha))


def waveguide_gains(cfg: SystemConfig, distances=None) -> np.ndarray:
    """Port amplitudes ``sqrt(eta N_G / L_{G,k}^beta)``."""
    d = cfg.distances if distances is None else np.asarray(distances, dtype=float)
    return np.sqrt(eta(cfg) * cfg.N_G / d**cfg.beta)


@dataclass(frozen=True)
class BsChannel:
    coefficients: np.ndarray  # h_tilde_B, unit-variance CN(0, 1) entries
    scale: float

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients, dtype=complex)
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("BS channel coefficients must be finite")
        if not self.scale > 0:
            raise ValueError("BS channel scale must be positive")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def vector(self) -> np.ndarray:
        return self.scale * self.coefficients

    @property
    def n_antennas(self) -> int:
        return self.coefficients.shape[-1]


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    """Circularly symmetric CN(0, 1) samples."""
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) * np.sqrt(0.5)


def sample_bs_channel(cfg: SystemConfig, rng: np.random.Generator) -> BsChannel:
    return BsChannel(complex_gaussian(rng, cfg.N_B), bs_scale(cfg))


def draw_waveguide_phases(
    cfg: SystemConfig, rng: np.random.Generator, size, mode: str = "uniform"
) -> tuple[np.ndarray, np.ndarray]:
    """Random reference-antenna phases and distances for ``size`` realisations.

    ``mode="uniform"`` draws phi_k ~ U(0, 2 pi) at the nominal distances.
    ``mode="jitter"`` draws L_{G,k} ~ U(L - lambda/2, L + lambda/2) and takes
    phi_k = 2 pi L_{G,k} / lambda mod 2 pi. Returns ``(phases, distances)``,
    each of shape ``(*size, K)``.
    """
    size = (size,) if np.isscalar(size) else tuple(size)
    shape = (*size, cfg.K)
    nominal = np.broadcast_to(cfg.distances, shape)
    if mode == "uniform":
        return rng.uniform(0.0, TWO_PI, shape), np.array(nominal)
    if mode == "jitter":
        lam, _ = wavelengths(cfg)
        dist = nominal + rng.uniform(-lam / 2, lam / 2, shape)
        return np.mod(TWO_PI * dist / lam, TWO_PI), dist
    raise ValueError(f"unknown phase mode {mode!r}")


def waveguide_channel(placement: PlacementResult, distance: float, cfg: SystemConfig) -> complex:
    """Equivalent RF-port channel ``sqrt(eta N_G / L^beta) exp(-j phi_k)``.

    Raises IncoherentPlacement when the antennas are not phase-congruent, since
    the per-antenna sum only collapses to this form when they are.
    """
    err = placement.max_congruence_error()
    if err > PHASE_TOL:
        raise IncoherentPlacement(f"antenna phases deviate by {err:.3g} rad from the anchor")
    n = placement.n_antennas
    amp = np.sqrt(eta(cfg) * n / distance**cfg.beta)
    return complex(amp * np.exp(-1j * placement.phase_anchor))


def waveguide_channel_bruteforce(
    placement: PlacementResult, distance: float, cfg: SystemConfig
) -> complex:
    """Direct per-antenna sum ``sqrt(eta / (L^beta N_G)) sum_n exp(-j psi_n)``."""
    n = placement.n_antennas
    psi = np.asarray(placement.phases)
    return complex(np.sqrt(eta(cfg) / (distance**cfg.beta * n)) * np.exp(-1j * psi).sum())


@dataclass(frozen=True)
class JointChannel:
    bs: BsChannel
    waveguide_gains: np.ndarray
    waveguide_phases: np.ndarray
    vector: np.ndarray

    @property
    def n_bs(self) -> int:
        return self.bs.n_antennas

    @property
    def n_waveguides(self) -> int:
        return len(self.waveguide_gains)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))


def joint_channel(
    bs: BsChannel, waveguides: Sequence[complex], cfg: SystemConfig | None = None
) -> JointChannel:
    """Concatenate the scaled BS channel with K waveguide port channels.

    When ``cfg`` is given the number of waveguide entries must equal ``cfg.K``.
    """
    h_g = np.asarray(list(waveguides), dtype=complex)
    if cfg is not None and len(h_g) != cfg.K:
        raise ValueError(f"expected {cfg.K} waveguide channels, got {len(h_g)}")
    gains = np.abs(h_g)
    phases = np.mod(-np.angle(h_g), TWO_PI)
    return JointChannel(
        bs=bs,
        waveguide_gains=gains,
        waveguide_phases=phases,
        vector=np.concatenate([bs.vector, h_g]),
    )


def joint_channel_from_phases(
    bs: BsChannel, gains, phases, cfg: SystemConfig | None = None
) -> JointChannel:
    gains = np.asarray(gains, dtype=float)
    return joint_channel(bs, gains * np.exp(-1j * np.asarray(phases, dtype=float)), cfg)


def received_snr(h: JointChannel | np.ndarray, w, cfg: SystemConfig) -> float:
    """Instantaneous SNR ``|h w|^2 P_t / sigma_n^2`` for a unit-norm beamformer."""
    hv = h.vector if isinstance(h, JointChannel) else np.asarray(h)
    wv = np.asarray(getattr(w, "weights", w), dtype=complex)
    if hv.shape != wv.shape:
        raise ValueError(f"channel shape {hv.shape} does not match beamformer {wv.shape}")
    if abs(np.linalg.norm(wv) - 1.0) > UNIT_NORM_TOL:
        raise ValueError(f"beamformer norm {np.linalg.norm(wv):.12g} is not 1")
    return float(np.abs(hv @ wv) ** 2 * cfg.P_t / noise_power(cfg))
