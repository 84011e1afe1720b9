"""Closed-form average SNRs, joint-transmission gains and their limits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .beamforming import Scheme
from .config import SystemConfig, db, eta, transmit_snr


@dataclass(frozen=True)
class SnrReport:
    scheme: Scheme
    snr_linear: float

    @property
    def snr_db(self) -> float:
        return float(db(self.snr_linear))


@dataclass(frozen=True)
class GainReport:
    v_sd: float
    v_scd: float
    v_fcd: float
    thresholds: dict = field(default_factory=dict)


@dataclass(frozen=True)
class AsymptoticRatios:
    scd_over_sd_limit: float
    fcd_over_scd_limit: float
    fcd_over_scd_exact: float


def average_channel_gain(scheme, cfg: SystemConfig, distances=None) -> float:
    """E{|h w|^2} for each scheme, with per-waveguide distances.

    ``distances`` defaults to ``cfg.distances``; its length is taken as K, so an
    empty sequence gives the BS-only limit.
    """
    scheme = Scheme(scheme)
    d = cfg.distances if distances is None else np.asarray(distances, dtype=float)
    k = len(d)
    n_b, n_g = cfg.N_B, cfg.N_G
    e = eta(cfg)
    bs_term = e * n_b / cfg.L_B**cfg.alpha
    inv_pl = float(np.sum(1.0 / d**cfg.beta)) if k else 0.0
    if scheme is Scheme.BS_ONLY:
        return bs_term
    if scheme is Scheme.SD:
        return (e * n_b**2 / cfg.L_B**cfg.alpha + e * n_g * inv_pl) / (n_b + k)
    if scheme is Scheme.SCD:
        return (e * n_b**2 / cfg.L_B**cfg.alpha + e * n_g * k * inv_pl) / (n_b + k)
    return bs_term + e * n_g * inv_pl


def analytic_snr(scheme, cfg: SystemConfig, distances=None) -> SnrReport:
    gain = average_channel_gain(scheme, cfg, distances)
    return SnrReport(Scheme(scheme), gain * transmit_snr(cfg))


def path_loss_ratio(cfg: SystemConfig) -> float:
    """``L_B^alpha / L_G^beta``; only meaningful for equal waveguide distances."""
    if not cfg.equal_distances:
        raise ValueError("gain ratios assume equal waveguide distances")
    return cfg.L_B**cfg.alpha / float(cfg.distances[0]) ** cfg.beta


def gains_from_ratio(n_b, k, n_g, ratio) -> tuple[float, float, float]:
    """Joint-transmission gains (V_SD, V_SCD, V_FCD) for a path-loss ratio."""
    base = n_b / (n_b + k)
    v_sd = base + n_g * k / (n_b * (n_b + k)) * ratio
    v_scd = base + n_g * k**2 / (n_b * (n_b + k)) * ratio
    v_fcd = 1.0 + n_g * k / n_b * ratio
    return v_sd, v_scd, v_fcd


def fcd_over_scd(n_b, k, n_g, ratio) -> float:
    return 1.0 + (n_b * k + n_b * k * n_g * ratio) / (n_b**2 + k**2 * n_g * ratio)


def gain_ratios(cfg: SystemConfig) -> GainReport:
    """Gains over BS-only plus the break-even thresholds.

    ``alpha_sd``/``alpha_scd`` solve ``L_B^alpha / L_G^beta = N_B/N_G`` and
    ``= N_B/(N_G K)``; ``ng_sd``/``ng_scd`` are the matching N_G thresholds at
    the configured alpha. Above a threshold the scheme beats BS-only.
    """
    r = path_loss_ratio(cfg)
    v_sd, v_scd, v_fcd = gains_from_ratio(cfg.N_B, cfg.K, cfg.N_G, r)
    lg_beta = float(cfg.distances[0]) ** cfg.beta
    log_lb = math.log(cfg.L_B)
    thresholds = {
        "alpha_sd": math.log(cfg.N_B / cfg.N_G * lg_beta) / log_lb if log_lb else math.nan,
        "alpha_scd": math.log(cfg.N_B / (cfg.N_G * cfg.K) * lg_beta) / log_lb if log_lb else math.nan,
        "ng_sd": cfg.N_B / r,
        "ng_scd": cfg.N_B / (cfg.K * r),
    }
    return GainReport(v_sd, v_scd, v_fcd, thresholds)


def asymptotic_ratios(cfg: SystemConfig) -> AsymptoticRatios:
    r = path_loss_ratio(cfg)
    return AsymptoticRatios(
        scd_over_sd_limit=float(cfg.K),
        fcd_over_scd_limit=1.0 + cfg.N_B / cfg.K,
        fcd_over_scd_exact=fcd_over_scd(cfg.N_B, cfg.K, cfg.N_G, r),
    )


def fcd_gain_coefficient(cfg: SystemConfig) -> float:
    """``N_B (V_FCD - 1) = N_G K L_B^alpha / L_G^beta``, the 1/N_B decay constant."""
    return cfg.N_G * cfg.K * path_loss_ratio(cfg)


def nb_turning_point(scheme, cfg: SystemConfig) -> float:
    """Continuous N_B minimising the SD/SCD average SNR (other parameters fixed).

    Both SNRs have the form ``(N_B^2 + A) / (N_B + K)`` up to a constant, whose
    minimum sits at ``-K + sqrt(K^2 + A)``.
    """
    scheme = Scheme(scheme)
    r = path_loss_ratio(cfg)
    if scheme is Scheme.SD:
        a = cfg.N_G * cfg.K * r
    elif scheme is Scheme.SCD:
        a = cfg.N_G * cfg.K**2 * r
    else:
        raise ValueError("only SD and SCD are non-monotone in N_B")
    return -cfg.K + math.sqrt(cfg.K**2 + a)
