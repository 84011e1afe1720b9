"""Monte-Carlo estimation of average received SNR and statistical checks.

Reproducibility model: trials are grouped in fixed-size chunks and chunk ``j``
draws from a Philox stream keyed by ``(seed, j)``. Every chunk reduces to
``(count, mean, M2)``, and chunks are merged in a fixed pairwise tree, so the
result does not depend on how many worker processes ran the chunks.

All schemes consume the same draws in the same order (common random numbers),
which makes per-realisation comparisons between schemes meaningful.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

from .analytics import average_channel_gain
from .beamforming import (
    ALL_SCHEMES,
    Scheme,
    bs_only_weights,
    coherent_gain,
    fcd_weights,
    scd_waveguide_weights,
    scd_weights,
    sd_weights,
)
from .channel import bs_scale, complex_gaussian, draw_waveguide_phases
from .config import SystemConfig, eta, transmit_snr
from .geometry import TWO_PI

CHUNK_SIZE = 2048
MIN_VALIDATION_SAMPLES = 10_000


@dataclass(frozen=True)
class McEstimate:
    scheme: Scheme
    mean_snr_linear: float
    std_error: float
    trials: int
    seed: int
    mean_gain: float = math.nan

    @property
    def mean_snr_db(self) -> float:
        return 10.0 * math.log10(self.mean_snr_linear)

    @property
    def std_error_db(self) -> float:
        """Delta-method standard error of the dB mean."""
        return 10.0 / math.log(10.0) * self.std_error / self.mean_snr_linear


@dataclass(frozen=True)
class PhasorSum:
    magnitude: np.ndarray  # G
    angle: np.ndarray  # Omega, with G exp(-j Omega) = sum_k a_k exp(-j phi_k)


def phasor_sum(amplitudes, phases) -> PhasorSum:
    s = np.sum(np.asarray(amplitudes) * np.exp(-1j * np.asarray(phases)), axis=-1)
    return PhasorSum(np.abs(s), -np.angle(s))


# -- streaming statistics -----------------------------------------------------


def _moments(x: np.ndarray) -> tuple[int, float, float]:
    n = x.shape[0]
    mean = float(np.mean(x))
    return n, mean, float(np.sum((x - mean) ** 2))


def _merge(a, b):
    na, ma, m2a = a
    nb, mb, m2b = b
    n = na + nb
    delta = mb - ma
    return n, ma + delta * nb / n, m2a + m2b + delta**2 * na * nb / n


def tree_reduce(parts: Sequence[tuple[int, float, float]]):
    """Pairwise merge in fixed order: ((p0 p1) (p2 p3)) ..."""
    parts = list(parts)
    if not parts:
        raise ValueError("nothing to reduce")
    while len(parts) > 1:
        nxt = [_merge(parts[i], parts[i + 1]) for i in range(0, len(parts) - 1, 2)]
        if len(parts) % 2:
            nxt.append(parts[-1])
        parts = nxt
    return parts[0]


def _summary(moments) -> tuple[float, float]:
    n, mean, m2 = moments
    se = math.sqrt(m2 / (n - 1) / n) if n > 1 else 0.0
    return mean, se


def chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(chunk),))
    return np.random.Generator(np.random.Philox(ss))


def _chunks(trials: int, chunk_size: int) -> list[tuple[int, int]]:
    return [(j, min(chunk_size, trials - start)) for j, start in enumerate(range(0, trials, chunk_size))]


# -- per-chunk simulation -----------------------------------------------------


def simulate_gains(
    cfg: SystemConfig,
    schemes: Iterable[Scheme],
    rng: np.random.Generator,
    n: int,
    phase_mode: str = "uniform",
) -> dict[Scheme, np.ndarray]:
    """Draw ``n`` channel realisations and return ``|h w|^2`` per scheme.

    SD sees independent random anchors. SCD keeps waveguide 1's random anchor
    and aligns the others to it. FCD anchors are placed at 0.
    """
    h_tilde = complex_gaussian(rng, (n, cfg.N_B))
    phases, dist = draw_waveguide_phases(cfg, rng, n, phase_mode)
    amps = np.sqrt(eta(cfg) * cfg.N_G / dist**cfg.beta)
    h_bs = bs_scale(cfg) * h_tilde

    # waveguide blocks are built once; h w is summed block-wise so the joint
    # vector is only materialised where the beamformer needs it (FCD)
    blocks = {
        "random": lambda: amps * np.exp(-1j * phases),
        "aligned": lambda: amps * np.exp(-1j * phases[:, :1]),
        "zero": lambda: amps.astype(complex),
    }
    cache = {}

    def block(kind):
        if kind not in cache:
            cache[kind] = blocks[kind]()
        return cache[kind]

    def inner(g, w):
        n_b = h_bs.shape[-1]
        return np.einsum("ij,ij->i", h_bs, w[:, :n_b]) + np.einsum("ij,ij->i", g, w[:, n_b:])

    out = {}
    for scheme in schemes:
        scheme = Scheme(scheme)
        if scheme is Scheme.BS_ONLY:
            hw = inner(block("random"), bs_only_weights(h_tilde, cfg.K))
        elif scheme is Scheme.SD:
            hw = inner(block("random"), sd_weights(h_tilde, cfg.K))
        elif scheme is Scheme.SCD:
            hw = inner(block("aligned"), scd_weights(h_tilde, amps**2))
        else:
            h = np.concatenate([h_bs, block("zero")], axis=-1)
            hw = np.einsum("ij,ij->i", h, fcd_weights(h))
        out[scheme] = np.abs(hw) ** 2
    return out


def _chunk_moments(cfg, schemes, seed, phase_mode, chunk):
    j, n = chunk
    gains = simulate_gains(cfg, schemes, chunk_rng(seed, j), n, phase_mode)
    return {s: _moments(g) for s, g in gains.items()}


def estimate_all(
    cfg: SystemConfig,
    schemes: Sequence = ALL_SCHEMES,
    trials: int | None = None,
    seed: int | None = None,
    *,
    phase_mode: str = "uniform",
    workers: int = 1,
    chunk_size: int = CHUNK_SIZE,
) -> dict[Scheme, McEstimate]:
    """Average received SNR of several schemes from shared channel draws."""
    trials = cfg.trials if trials is None else int(trials)
    seed = cfg.seed if seed is None else int(seed)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    schemes = [Scheme(s) for s in schemes]
    job = partial(_chunk_moments, cfg, schemes, seed, phase_mode)
    chunks = _chunks(trials, chunk_size)
    if workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, chunks))
    else:
        parts = [job(c) for c in chunks]
    snr0 = transmit_snr(cfg)
    out = {}
    for s in schemes:
        mean, se = _summary(tree_reduce([p[s] for p in parts]))
        out[s] = McEstimate(s, mean * snr0, se * snr0, trials, seed, mean_gain=mean)
    return out


def estimate_snr(scheme, cfg: SystemConfig, trials=None, seed=None, **kwargs) -> McEstimate:
    return estimate_all(cfg, [Scheme(scheme)], trials, seed, **kwargs)[Scheme(scheme)]


# -- statistical validators ---------------------------------------------------


@dataclass(frozen=True)
class KsCheck:
    statistic: float
    critical_value: float
    pvalue: float
    samples: int

    @property
    def passed(self) -> bool:
        return self.statistic < self.critical_value


def ks_critical_value(n: int, level: float = 0.01) -> float:
    return float(stats.kstwo.ppf(1.0 - level, n))


def _warn_samples(n: int, what: str):
    if n < MIN_VALIDATION_SAMPLES:
        warnings.warn(
            f"{what}: {n} samples gives insufficient statistical power "
            f"(recommended >= {MIN_VALIDATION_SAMPLES})",
            stacklevel=3,
        )


def validate_uniform_phase(k: int, amplitudes=None, samples: int = 100_000, seed: int = 0) -> KsCheck:
    """KS test of ``Omega mod 2 pi`` against U(0, 2 pi) for random-phase phasor sums."""
    _warn_samples(samples, "uniform-phase check")
    amps = np.ones(k) if amplitudes is None else np.asarray(amplitudes, dtype=float)
    if amps.shape != (k,):
        raise ValueError(f"need {k} amplitudes")
    rng = chunk_rng(seed, 0)
    phi = rng.uniform(0.0, TWO_PI, (samples, k))
    omega = np.mod(phasor_sum(amps, phi).angle, TWO_PI)
    res = stats.kstest(omega, stats.uniform(loc=0.0, scale=TWO_PI).cdf)
    return KsCheck(float(res.statistic), ks_critical_value(samples), float(res.pvalue), samples)


@dataclass(frozen=True)
class MeanCheck:
    name: str
    estimate: float
    std_error: float
    expected: float
    n_sigma: float = 3.0

    @property
    def passed(self) -> bool:
        # a few ulps of slack for degenerate zero-variance cases
        slack = 1e-12 * max(abs(self.expected), abs(self.estimate))
        return abs(self.estimate - self.expected) <= self.n_sigma * self.std_error + slack

    @property
    def z_score(self) -> float:
        diff = self.estimate - self.expected
        return diff / self.std_error if self.std_error > 0 else (0.0 if diff == 0 else math.inf)


def validate_g_squared(cfg: SystemConfig, samples: int = 100_000, seed: int = 0) -> MeanCheck:
    """Empirical E{G^2} of the random-phase waveguide phasor sum vs sum_k 1/L_k^beta."""
    _warn_samples(samples, "E{G^2} check")
    amps = np.sqrt(1.0 / cfg.distances**cfg.beta)
    rng = chunk_rng(seed, 0)
    phi = rng.uniform(0.0, TWO_PI, (samples, cfg.K))
    g2 = phasor_sum(amps, phi).magnitude ** 2
    mean, se = _summary(_moments(g2))
    return MeanCheck("E{G^2}", mean, se, float(np.sum(amps**2)))


@dataclass(frozen=True)
class SplitCheck:
    vectors: int
    random_weightings: int
    worst_margin: float  # min over vectors of (optimal gain - best random gain) / optimal
    max_gap_to_sum: float  # max |optimal gain - sum p| / sum p

    @property
    def passed(self) -> bool:
        return self.worst_margin >= 0 and self.max_gap_to_sum < 1e-12


def validate_power_split(
    k: int, vectors: int = 100, random_weightings: int = 1000, seed: int = 0, gains=None
) -> SplitCheck:
    """Gain-proportional split vs random simplex weightings on random gain vectors."""
    rng = chunk_rng(seed, 1)
    if gains is None:
        gains = rng.uniform(0.01, 10.0, (vectors, k))
    gains = np.atleast_2d(np.asarray(gains, dtype=float))
    worst, gap = math.inf, 0.0
    for p in gains:
        opt = float(coherent_gain(p, scd_waveguide_weights(p)))
        rand = coherent_gain(p, rng.dirichlet(np.ones(len(p)), random_weightings))
        worst = min(worst, (opt - float(rand.max())) / opt)
        gap = max(gap, abs(opt - p.sum()) / p.sum())
    return SplitCheck(len(gains), random_weightings, worst, gap)


@dataclass
class PropositionReport:
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self) -> list[str]:
        out = []
        for c in self.checks:
            tag = "PASS" if c.passed else "FAIL"
            if isinstance(c, MeanCheck):
                out.append(
                    f"[{tag}] {c.name}: estimate={c.estimate:.6e} expected={c.expected:.6e} "
                    f"stderr={c.std_error:.3e} z={c.z_score:+.2f}"
                )
            else:
                out.append(f"[{tag}] {c}")
        return out


def _sd_cross_term(cfg, rng, n):
    """2 Re(bs * conj(pas)) of the SD equivalent channel; its mean should be 0."""
    h_tilde = complex_gaussian(rng, (n, cfg.N_B))
    phases, dist = draw_waveguide_phases(cfg, rng, n, "uniform")
    total = cfg.N_B + cfg.K
    bs = np.sqrt(eta(cfg) * cfg.N_B / total / cfg.L_B**cfg.alpha) * np.linalg.norm(h_tilde, axis=1)
    pas = np.sqrt(eta(cfg) * cfg.N_G / total) * np.sum(
        np.sqrt(1.0 / dist**cfg.beta) * np.exp(-1j * phases), axis=1
    )
    return 2.0 * np.real(bs * np.conj(pas))


def validate_propositions(cfg: SystemConfig, trials: int | None = None, seed: int | None = None):
    """Monte-Carlo channel-gain means vs the closed forms, plus the split optimality."""
    trials = cfg.trials if trials is None else int(trials)
    seed = cfg.seed if seed is None else int(seed)
    _warn_samples(trials, "proposition checks")
    report = PropositionReport()
    for mode in ("uniform", "jitter"):
        est = estimate_all(cfg, ALL_SCHEMES, trials, seed, phase_mode=mode)
        snr0 = transmit_snr(cfg)
        for s, e in est.items():
            report.checks.append(
                MeanCheck(
                    f"E|h w|^2 {s.value} ({mode} phases)",
                    e.mean_gain,
                    e.std_error / snr0,
                    average_channel_gain(s, cfg),
                )
            )
    cross = _sd_cross_term(cfg, chunk_rng(seed, 7), trials)
    mean, se = _summary(_moments(cross))
    report.checks.append(MeanCheck("SD BS/PAS cross term", mean, se, 0.0))
    report.checks.append(validate_power_split(cfg.K, seed=seed))
    return report
