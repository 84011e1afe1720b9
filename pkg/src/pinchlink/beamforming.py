"""Transmit weights and power splits for the four transmission schemes.

Waveguide phase corrections are realised by antenna placement, so after
alignment the digital waveguide weights are real and non-negative. Passing
``strict=True`` to the SCD/FCD constructors instead carries the phases in
complex weights, which is handy as an independent cross-check.

The ``*_weights`` helpers are vectorised over any leading batch dimensions
and are what the Monte-Carlo engine uses; the ``make_*`` constructors wrap
them for a single channel realisation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .channel import UNIT_NORM_TOL, BsChannel, JointChannel
from .config import SystemConfig, eta
from .geometry import PHASE_TOL, phase_distance


class Scheme(str, enum.Enum):
    BS_ONLY = "bs_only"
    SD = "sd"
    SCD = "scd"
    FCD = "fcd"

    @classmethod
    def parse(cls, name: str) -> "Scheme":
        key = name.strip().lower().replace("-", "_")
        aliases = {"bsonly": "bs_only", "bo": "bs_only", "bs": "bs_only"}
        return cls(aliases.get(key, key))


ALL_SCHEMES = (Scheme.BS_ONLY, Scheme.SD, Scheme.SCD, Scheme.FCD)


@dataclass(frozen=True)
class Beamformer:
    scheme: Scheme
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=complex)
        if abs(np.linalg.norm(w) - 1.0) > UNIT_NORM_TOL:
            raise ValueError(f"beamformer norm {np.linalg.norm(w):.12g} is not 1")
        object.__setattr__(self, "weights", w)


@dataclass(frozen=True)
class PowerAllocation:
    bs_fraction: float
    waveguide_fractions: tuple[float, ...]

    def __post_init__(self):
        fr = tuple(float(v) for v in self.waveguide_fractions)
        object.__setattr__(self, "waveguide_fractions", fr)
        if self.bs_fraction < 0 or any(v < 0 for v in fr):
            raise ValueError("power fractions must be non-negative")
        total = self.bs_fraction + sum(fr)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"power fractions sum to {total!r}, not 1")

    @property
    def waveguide_total(self) -> float:
        return sum(self.waveguide_fractions)


def scd_waveguide_weights(gains) -> np.ndarray:
    """Optimal split of the waveguide power pool: proportional to each port gain.

    With these weights the coherent gain ``(sum_k sqrt(p_k w_k))^2`` equals
    ``sum_k p_k``. Works row-wise on ``(..., K)`` arrays.
    """
    p = np.asarray(gains, dtype=float)
    if np.any(p <= 0) or not np.all(np.isfinite(p)):
        raise ValueError("waveguide gains must be positive and finite")
    return p / p.sum(axis=-1, keepdims=True)


def coherent_gain(gains, weights) -> np.ndarray:
    p = np.asarray(gains, dtype=float)
    w = np.asarray(weights, dtype=float)
    return np.sum(np.sqrt(p * w), axis=-1) ** 2


def static_power_allocation(scheme, cfg: SystemConfig, gains=None) -> PowerAllocation:
    """RF-chain-proportional allocation for BS-only, SD and SCD.

    SCD splits its waveguide pool with :func:`scd_waveguide_weights` using the
    port gains ``eta N_G / L_{G,k}^beta`` (or ``gains`` when given).
    """
    scheme = Scheme(scheme)
    n_b, k = cfg.N_B, cfg.K
    if scheme is Scheme.BS_ONLY:
        return PowerAllocation(1.0, (0.0,) * k)
    if scheme is Scheme.SD:
        return PowerAllocation(n_b / (n_b + k), (1.0 / (n_b + k),) * k)
    if scheme is Scheme.SCD:
        if gains is None:
            gains = port_gains(cfg)
        split = scd_waveguide_weights(gains)
        bs = n_b / (n_b + k)
        pool = k / (n_b + k)
        fr = pool * split
        # absorb rounding so the invariant holds exactly
        fr[-1] = 1.0 - bs - fr[:-1].sum()
        return PowerAllocation(bs, tuple(fr))
    raise ValueError("FCD power allocation is channel dependent; use fcd_average_power_ratios")


def fcd_average_power_ratios(cfg: SystemConfig) -> PowerAllocation:
    """Long-run average BS and per-waveguide power shares under FCD's MRT."""
    n_b, n_g = cfg.N_B, cfg.N_G
    lb = cfg.L_B**cfg.alpha
    lg = cfg.distances**cfg.beta
    bs = n_b / (n_b + n_g * np.sum(lb / lg))
    wg = n_g / (n_b * lg / lb + n_g * np.sum(lg[:, None] / lg[None, :], axis=1))
    return PowerAllocation(float(bs), tuple(float(v) for v in wg))


# -- vectorised weight builders ---------------------------------------------


def _mrt_block(h_tilde: np.ndarray, power: float) -> np.ndarray:
    norm = np.linalg.norm(h_tilde, axis=-1, keepdims=True)
    if np.any(norm == 0):
        raise ValueError("BS channel is identically zero")
    return np.sqrt(power) * np.conj(h_tilde) / norm


def bs_only_weights(h_tilde, n_waveguides: int) -> np.ndarray:
    h_tilde = np.asarray(h_tilde, dtype=complex)
    pad = np.zeros((*h_tilde.shape[:-1], n_waveguides), dtype=complex)
    return np.concatenate([_mrt_block(h_tilde, 1.0), pad], axis=-1)


def sd_weights(h_tilde, n_waveguides: int) -> np.ndarray:
    h_tilde = np.asarray(h_tilde, dtype=complex)
    n_b = h_tilde.shape[-1]
    total = n_b + n_waveguides
    wg = np.full((*h_tilde.shape[:-1], n_waveguides), np.sqrt(1.0 / total), dtype=complex)
    return np.concatenate([_mrt_block(h_tilde, n_b / total), wg], axis=-1)


def scd_weights(h_tilde, port_gains, phase_offsets=None) -> np.ndarray:
    """SCD weights; ``phase_offsets`` are ``phi_1 - phi_k`` for the strict form."""
    h_tilde = np.asarray(h_tilde, dtype=complex)
    p = np.asarray(port_gains, dtype=float)
    n_b, k = h_tilde.shape[-1], p.shape[-1]
    pool = k / (n_b + k)
    wg = np.sqrt(pool * scd_waveguide_weights(p)).astype(complex)
    wg = np.broadcast_to(wg, (*h_tilde.shape[:-1], k))
    if phase_offsets is not None:
        wg = wg * np.exp(-1j * np.asarray(phase_offsets, dtype=float))
    return np.concatenate([_mrt_block(h_tilde, n_b / (n_b + k)), wg], axis=-1)


def fcd_weights(h) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    norm = np.linalg.norm(h, axis=-1, keepdims=True)
    if np.any(norm == 0):
        raise ValueError("joint channel is identically zero")
    return np.conj(h) / norm


# -- single-realisation constructors ----------------------------------------


def make_bs_only_beamformer(bs: BsChannel, cfg: SystemConfig) -> Beamformer:
    return Beamformer(Scheme.BS_ONLY, bs_only_weights(bs.coefficients, cfg.K))


def make_sd_beamformer(bs: BsChannel, cfg: SystemConfig) -> Beamformer:
    return Beamformer(Scheme.SD, sd_weights(bs.coefficients, cfg.K))


def make_scd_beamformer(
    bs: BsChannel, port_amplitudes, anchors, cfg: SystemConfig | None = None, *, strict=False
) -> Beamformer:
    """SCD weights from port amplitudes ``sqrt(eta N_G / L_{G,k}^beta)``.

    Without ``strict`` the anchors must already be aligned (placement did the
    phase work). With ``strict`` any anchors are accepted and the weights carry
    ``exp(-j(phi_1 - phi_k))``.
    """
    amps = np.asarray(port_amplitudes, dtype=float)
    anchors = np.asarray(anchors, dtype=float)
    if cfg is not None and len(amps) != cfg.K:
        raise ValueError(f"expected {cfg.K} waveguide amplitudes, got {len(amps)}")
    if len(anchors) != len(amps):
        raise ValueError("need one anchor per waveguide")
    offsets = anchors[0] - anchors
    if strict:
        w = scd_weights(bs.coefficients, amps**2, offsets)
    else:
        spread = float(np.max(phase_distance(anchors, anchors[0])))
        if spread > PHASE_TOL:
            raise ValueError(f"waveguide anchors are misaligned by up to {spread:.3g} rad")
        w = scd_weights(bs.coefficients, amps**2)
    return Beamformer(Scheme.SCD, w)


def make_fcd_beamformer(h: JointChannel, *, strict: bool = False) -> Beamformer:
    """MRT over the joint channel. Non-strict mode expects anchors placed at 0."""
    if not strict and h.n_waveguides:
        spread = float(np.max(phase_distance(h.waveguide_phases, 0.0)))
        if spread > PHASE_TOL:
            raise ValueError(
                f"waveguide anchors are {spread:.3g} rad from 0; run FCD placement first"
            )
    return Beamformer(Scheme.FCD, fcd_weights(h.vector))


def make_beamformer(scheme, h: JointChannel, cfg: SystemConfig, *, strict=False) -> Beamformer:
    scheme = Scheme(scheme)
    if scheme is Scheme.BS_ONLY:
        return make_bs_only_beamformer(h.bs, cfg)
    if scheme is Scheme.SD:
        return make_sd_beamformer(h.bs, cfg)
    if scheme is Scheme.SCD:
        return make_scd_beamformer(h.bs, h.waveguide_gains, h.waveguide_phases, cfg, strict=strict)
    return make_fcd_beamformer(h, strict=strict)


def port_gains(cfg: SystemConfig) -> np.ndarray:
    """``p_k = eta N_G / L_{G,k}^beta`` for every waveguide."""
    return eta(cfg) * cfg.N_G / cfg.distances**cfg.beta
