"""Validation report: statistical checks plus documented numeric discrepancies.

Some published worked-example numbers cannot be reproduced from the stated
parameters. They are recomputed here and reported side by side; they are
informational and never gate a validation run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .analytics import (
    fcd_gain_coefficient,
    fcd_over_scd,
    gain_ratios,
    nb_turning_point,
    path_loss_ratio,
)
from .config import SPEED_OF_LIGHT, SystemConfig
from .geometry import (
    TWO_PI,
    Point3,
    WaveguideSpec,
    align_fcd,
    align_scd,
    axial_phase,
)
from .montecarlo import (
    PropositionReport,
    validate_g_squared,
    validate_propositions,
    validate_uniform_phase,
)

# Two-waveguide street-canyon example: 3.5 GHz, n_eff = 1.5.
EXAMPLE_UE = Point3(30.0, 5.0, 0.0)
EXAMPLE_WAVEGUIDES = (
    WaveguideSpec(feed=Point3(0.0, 0.0, 10.0), reference_position=Point3(20.0, 0.0, 10.0)),
    WaveguideSpec(feed=Point3(0.0, 30.0, 10.0), reference_position=Point3(20.0, 30.0, 10.0)),
)
PUBLISHED = {
    "anchors": (2.748, 0.846),
    "scd_reference_x": 20.017,
    "fcd_reference_x": (19.975, 19.935),
    "fcd_gain_coefficient": 1224.0,
    "nb_thresholds": (30.0, 80.0),
}


@dataclass
class ExampleGeometryResult:
    c: float
    anchors: tuple[float, float]
    scd_reference_x: float
    fcd_reference_x: tuple[float, float]


def example_geometry(c: float) -> ExampleGeometryResult:
    cfg = SystemConfig(c=c, K=2, N_G=1)
    anchors = tuple(
        float(np.mod(axial_phase(wg, EXAMPLE_UE, wg.reference_offset, cfg), TWO_PI))
        for wg in EXAMPLE_WAVEGUIDES
    )
    scd = align_scd(EXAMPLE_WAVEGUIDES, EXAMPLE_UE, cfg)
    fcd = align_fcd(EXAMPLE_WAVEGUIDES, EXAMPLE_UE, cfg)
    return ExampleGeometryResult(
        c=c,
        anchors=anchors,
        scd_reference_x=scd[1].reference.x,
        fcd_reference_x=tuple(r.reference.x for r in fcd),
    )


def discrepancy_lines(cfg: SystemConfig | None = None) -> list[str]:
    cfg = SystemConfig() if cfg is None else cfg
    coeff = fcd_gain_coefficient(cfg)
    needed_ratio = PUBLISHED["fcd_gain_coefficient"] / (cfg.N_G * cfg.K)
    lg_beta = float(cfg.distances[0]) ** cfg.beta
    needed_alpha = math.log(needed_ratio * lg_beta) / math.log(cfg.L_B)
    lines = [
        "## Documented discrepancies (informational, not acceptance targets)",
        "",
        "### FCD gain decay constant",
        f"- computed N_B*(V_FCD - 1) = N_G*K*L_B^alpha/L_G^beta = {coeff:.2f} "
        f"(path-loss ratio {path_loss_ratio(cfg):.4f})",
        f"- published value: {PUBLISHED['fcd_gain_coefficient']:.0f}; it would need a ratio of "
        f"{needed_ratio:.4f}, i.e. alpha = {needed_alpha:.4f} instead of {cfg.alpha}",
        f"- N_B at which V_FCD falls to 2 (3 dB): computed {coeff:.0f}, published "
        f"{PUBLISHED['fcd_gain_coefficient']:.0f}",
        "",
        "### FCD over SCD at K = N_B",
        f"- exact ratio at K = N_B = {cfg.N_B}: "
        f"{fcd_over_scd(cfg.N_B, cfg.N_B, cfg.N_G, path_loss_ratio(cfg)):.12f} "
        "(identically 2 for any ratio: numerator and denominator both equal N_B^2 (1 + N_G r))",
        "",
        "### N_B thresholds of SD/SCD",
        f"- continuous SNR minimum over N_B: SD {nb_turning_point('sd', cfg):.2f}, "
        f"SCD {nb_turning_point('scd', cfg):.2f} (published thresholds "
        f"{PUBLISHED['nb_thresholds'][0]:.0f} and {PUBLISHED['nb_thresholds'][1]:.0f})",
        f"- break-even with BS-only: SD beats BS-only iff N_B < N_G*r = "
        f"{cfg.N_G * path_loss_ratio(cfg):.1f}; SCD iff N_B < N_G*K*r = "
        f"{cfg.N_G * cfg.K * path_loss_ratio(cfg):.1f}. Neither crosses BS-only for N_B <= 128.",
        "",
        "### Worked-example geometry (UE (30,5,0), feeds (0,0,10)/(0,30,10), refs x = 20)",
        f"- published anchors {PUBLISHED['anchors']}, SCD waveguide-2 reference x = "
        f"{PUBLISHED['scd_reference_x']}, FCD reference x = {PUBLISHED['fcd_reference_x']}",
    ]
    for c in (SPEED_OF_LIGHT, 3.0e8):
        ex = example_geometry(c)
        lines.append(
            f"- c = {c:.9g}: anchors ({ex.anchors[0]:.3f}, {ex.anchors[1]:.3f}), "
            f"SCD ref x = {ex.scd_reference_x:.3f}, "
            f"FCD ref x = ({ex.fcd_reference_x[0]:.3f}, {ex.fcd_reference_x[1]:.3f})"
        )
    lines.append(
        "- the published constants do not reproduce with either value of c; placement is "
        "instead verified by phase congruence and a dense-scan nearest-solution oracle."
    )
    return lines


@dataclass
class ValidationResult:
    propositions: PropositionReport
    uniform_phase: dict = field(default_factory=dict)
    g_squared: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (
            self.propositions.passed
            and all(c.passed for c in self.uniform_phase.values())
            and all(c.passed for c in self.g_squared)
        )


def run_validation(
    cfg: SystemConfig, trials: int | None = None, seed: int | None = None, samples: int = 100_000
) -> ValidationResult:
    seed = cfg.seed if seed is None else int(seed)
    props = validate_propositions(cfg, trials, seed)
    amps = np.sqrt(1.0 / cfg.distances**cfg.beta)
    uniform = {}
    for k in (1, 2, 4, 8):
        a = amps if k == cfg.K else np.full(k, amps[0])
        uniform[k] = validate_uniform_phase(k, a, samples, seed)
    g2 = [validate_g_squared(cfg, samples, seed)]
    return ValidationResult(props, uniform, g2)


def render_report(result: ValidationResult, cfg: SystemConfig) -> str:
    gains = gain_ratios(cfg) if cfg.equal_distances else None
    lines = ["# Validation report", "", "## Closed form vs Monte Carlo", ""]
    lines += [f"- {l}" for l in result.propositions.lines()]
    lines += ["", "## Uniform phase of random phasor sums (KS, 1% level)", ""]
    for k, c in result.uniform_phase.items():
        tag = "PASS" if c.passed else "FAIL"
        lines.append(
            f"- [{tag}] K={k}: D={c.statistic:.5f} critical={c.critical_value:.5f} "
            f"p={c.pvalue:.3f} n={c.samples}"
        )
    lines += ["", "## E{G^2}", ""]
    for c in result.g_squared:
        tag = "PASS" if c.passed else "FAIL"
        lines.append(
            f"- [{tag}] estimate={c.estimate:.6e} expected={c.expected:.6e} stderr={c.std_error:.3e}"
        )
    if gains is not None:
        t = gains.thresholds
        lines += [
            "",
            "## Gains and thresholds at this configuration",
            "",
            f"- V_SD={gains.v_sd:.4f} V_SCD={gains.v_scd:.4f} V_FCD={gains.v_fcd:.4f}",
            f"- alpha*_SD={t['alpha_sd']:.4f} alpha*_SCD={t['alpha_scd']:.4f} "
            f"N_G*_SD={t['ng_sd']:.4f} N_G*_SCD={t['ng_scd']:.4f}",
        ]
    lines += ["", "Discrepancies below are evaluated at the default parameter set.", ""]
    lines += discrepancy_lines(SystemConfig(c=cfg.c))
    lines += ["", f"Overall: {'PASS' if result.passed else 'FAIL'}", ""]
    return "\n".join(lines)
