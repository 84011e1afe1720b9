"""Command-line front end.

Exit codes: 0 success, 1 statistical validation failure, 2 configuration or
usage error, 3 placement infeasible.
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings
from pathlib import Path

from .analytics import analytic_snr, gain_ratios
from .beamforming import ALL_SCHEMES, Scheme, fcd_average_power_ratios
from .config import ConfigError, SystemConfig, load_config
from .experiment import (
    PRESET_GROUPS,
    PRESETS,
    VARIABLES,
    SweepError,
    SweepSpec,
    check_placement,
    resolve_presets,
    rows_to_csv,
    run_sweep,
    write_manifest,
)
from .geometry import (
    PlacementInfeasible,
    align_fcd,
    align_scd,
    waveguides_from_geometry,
)
from .montecarlo import estimate_all
from .report import render_report, run_validation

EXIT_OK, EXIT_STAT_FAIL, EXIT_CONFIG, EXIT_PLACEMENT = 0, 1, 2, 3


def _common(p: argparse.ArgumentParser, mc: bool = False):
    p.add_argument("--config", type=Path, help="TOML config file (defaults to the standard parameter set)")
    p.add_argument("--seed", type=int, help="RNG seed (overrides config and PINCHLINK_SEED)")
    p.add_argument("--out", type=Path, default=Path("results"), help="output directory")
    if mc:
        p.add_argument("--trials", type=int, help="Monte-Carlo trials per point")
        p.add_argument("--no-mc", action="store_true", help="analytic curves only")
        p.add_argument("--workers", type=int, default=1, help="worker processes for MC chunks")
        p.add_argument(
            "--phase-mode",
            choices=("uniform", "jitter"),
            default="uniform",
            help="SD/SCD anchor randomisation: direct U(0,2pi) draw or distance jitter",
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pinchlink", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="closed-form SNR, gains and FCD power shares")
    _common(p)

    p = sub.add_parser("mc", help="Monte-Carlo SNR for every scheme at the configured point")
    _common(p, mc=True)
    p.add_argument("--schemes", nargs="*", default=[s.value for s in ALL_SCHEMES])

    p = sub.add_parser("sweep", help="parameter sweep to CSV")
    _common(p, mc=True)
    p.add_argument("--preset", choices=sorted([*PRESETS, *PRESET_GROUPS]))
    p.add_argument("--variable", choices=VARIABLES)
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--step", type=float)
    p.add_argument("--values", type=float, nargs="+", help="explicit sweep values")
    p.add_argument("--schemes", nargs="*", default=None)

    p = sub.add_parser("validate", help="statistical checks of the closed forms")
    _common(p, mc=True)
    p.add_argument("--samples", type=int, default=100_000, help="samples for phasor checks")

    p = sub.add_parser("thresholds", help="break-even path-loss exponent and N_G thresholds")
    _common(p)

    p = sub.add_parser("place", help="SCD/FCD antenna placement for the config geometry")
    _common(p)
    return parser


def _load(args) -> SystemConfig:
    cfg = load_config(args.config)
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if getattr(args, "trials", None) is not None:
        changes["trials"] = args.trials
    return cfg.replace(**changes) if changes else cfg


def _schemes(names) -> tuple[Scheme, ...]:
    if not names:
        raise SweepError("no schemes selected")
    try:
        return tuple(Scheme.parse(n) for n in names)
    except ValueError as exc:
        raise SweepError(str(exc)) from exc


def cmd_analyze(args, cfg, out):
    print(f"{'scheme':<8} {'SNR [dB]':>10}")
    for s in ALL_SCHEMES:
        print(f"{s.value:<8} {analytic_snr(s, cfg).snr_db:>10.4f}")
    if cfg.equal_distances:
        g = gain_ratios(cfg)
        print(f"V_SD={g.v_sd:.4f}  V_SCD={g.v_scd:.4f}  V_FCD={g.v_fcd:.4f}")
    pa = fcd_average_power_ratios(cfg)
    shares = ", ".join(f"{v:.4f}" for v in pa.waveguide_fractions)
    print(f"FCD average power: BS {pa.bs_fraction:.4f}, waveguides [{shares}]")
    return EXIT_OK


def cmd_mc(args, cfg, out):
    schemes = _schemes(args.schemes)
    check_placement(cfg)
    est = {}
    if not args.no_mc:
        est = estimate_all(cfg, schemes, phase_mode=args.phase_mode, workers=args.workers)
    rows = []
    for s in schemes:
        e = est.get(s)
        rows.append(
            {
                "scheme": s.value,
                "variable": "transmit_power_db",
                "value": 10.0 * math.log10(cfg.P_t),
                "analytic_snr_db": analytic_snr(s, cfg).snr_db,
                "mc_snr_db": e.mean_snr_db if e else None,
                "mc_stderr_db": e.std_error_db if e else None,
                "trials": cfg.trials if e else None,
                "seed": cfg.seed if e else None,
            }
        )
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "mc.csv"
    csv_path.write_text(rows_to_csv(rows), encoding="utf-8")
    write_manifest(
        out / "mc.manifest.json",
        cfg,
        {"csv": csv_path},
        trials=cfg.trials,
        seed=cfg.seed,
        phase_mode=args.phase_mode,
        schemes=[s.value for s in schemes],
    )
    for r in rows:
        mc = "" if r["mc_snr_db"] is None else f"  MC {r['mc_snr_db']:.4f} +/- {r['mc_stderr_db']:.4f}"
        print(f"{r['scheme']:<8} analytic {r['analytic_snr_db']:.4f}{mc}")
    print(f"wrote {csv_path}")
    return EXIT_OK


def cmd_sweep(args, cfg, out):
    mc = not args.no_mc
    if args.preset:
        specs = resolve_presets(args.preset)
        if args.schemes is not None:
            schemes = _schemes(args.schemes)
            specs = [SweepSpec(s.variable, s.values, schemes, mc, s.overrides, s.name) for s in specs]
        else:
            specs = [SweepSpec(s.variable, s.values, s.schemes, mc, s.overrides, s.name) for s in specs]
    else:
        if args.variable is None:
            raise SweepError("give --preset or --variable")
        schemes = _schemes(args.schemes if args.schemes is not None else [s.value for s in ALL_SCHEMES])
        if args.values:
            specs = [SweepSpec(args.variable, tuple(args.values), schemes, mc, name=args.variable)]
        else:
            if None in (args.start, args.stop, args.step):
                raise SweepError("--variable needs --values or --start/--stop/--step")
            specs = [
                SweepSpec.from_range(
                    args.variable, args.start, args.stop, args.step,
                    schemes=schemes, mc_enabled=mc, name=args.variable,
                )
            ]
    for spec in specs:
        path = run_sweep(spec, cfg, out, phase_mode=args.phase_mode, workers=args.workers)
        print(f"wrote {path}")
    return EXIT_OK


def cmd_validate(args, cfg, out):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        result = run_validation(cfg, samples=args.samples)
    for w in {str(w.message) for w in caught}:
        print(f"warning: {w}", file=sys.stderr)
    text = render_report(result, cfg)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "validation_report.md"
    path.write_text(text, encoding="utf-8")
    print(text)
    print(f"wrote {path}")
    return EXIT_OK if result.passed else EXIT_STAT_FAIL


def cmd_thresholds(args, cfg, out):
    g = gain_ratios(cfg)
    t = g.thresholds
    print(f"alpha*_SD  = {t['alpha_sd']:.4f}")
    print(f"alpha*_SCD = {t['alpha_scd']:.4f}")
    print(f"N_G*_SD    = {t['ng_sd']:.4f}")
    print(f"N_G*_SCD   = {t['ng_scd']:.4f}")
    print(f"V_SD = {g.v_sd:.4f}, V_SCD = {g.v_scd:.4f}, V_FCD = {g.v_fcd:.4f}")
    return EXIT_OK


def cmd_place(args, cfg, out):
    if cfg.geometry is None:
        raise ConfigError("config has no [geometry] block")
    wgs = waveguides_from_geometry(cfg.geometry)
    for name, solver in (("SCD", align_scd), ("FCD", align_fcd)):
        print(f"{name} placement:")
        for k, res in enumerate(solver(wgs, cfg.geometry.ue, cfg), start=1):
            xs = ", ".join(f"({p.x:.4f}, {p.y:.4f}, {p.z:.4f})" for p in res.positions)
            print(f"  waveguide {k}: anchor {res.phase_anchor:.6f} rad, shift {res.reference_shift:.4f} m")
            print(f"    {xs}")
    return EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "mc": cmd_mc,
    "sweep": cmd_sweep,
    "validate": cmd_validate,
    "thresholds": cmd_thresholds,
    "place": cmd_place,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load(args)
        return COMMANDS[args.command](args, cfg, args.out)
    except (ConfigError, SweepError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PlacementInfeasible as exc:
        print(f"placement infeasible: {exc}", file=sys.stderr)
        return EXIT_PLACEMENT


if __name__ == "__main__":
    sys.exit(main())
