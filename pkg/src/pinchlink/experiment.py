"""Parameter sweeps, figure presets, CSV output and run manifests."""

from __future__ import annotations

import csv
import datetime as _dt
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .analytics import analytic_snr
from .beamforming import ALL_SCHEMES, Scheme
from .config import SystemConfig, config_hash
from .geometry import align_fcd, align_scd, waveguides_from_geometry
from .montecarlo import estimate_all

CSV_COLUMNS = (
    "scheme",
    "variable",
    "value",
    "analytic_snr_db",
    "mc_snr_db",
    "mc_stderr_db",
    "trials",
    "seed",
)
VARIABLES = ("transmit_power_db", "alpha", "n_b", "k_waveguides", "n_g")
_INTEGER_VARIABLES = {"n_b", "k_waveguides", "n_g"}


class SweepError(ValueError):
    pass


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    values: tuple
    schemes: tuple = ALL_SCHEMES
    mc_enabled: bool = True
    overrides: dict = field(default_factory=dict)
    name: str = "sweep"

    def __post_init__(self):
        if self.variable not in VARIABLES:
            raise SweepError(f"unknown sweep variable {self.variable!r}; choose from {VARIABLES}")
        if not self.values:
            raise SweepError("sweep range is empty")
        if not self.schemes:
            raise SweepError("no schemes selected")
        object.__setattr__(self, "schemes", tuple(Scheme(s) for s in self.schemes))
        if self.variable in _INTEGER_VARIABLES:
            vals = tuple(int(v) for v in self.values)
            if any(v < 1 for v in vals):
                raise SweepError(f"{self.variable} values must be >= 1")
        else:
            vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_range(cls, variable, start, stop, step, **kwargs) -> "SweepSpec":
        if not step > 0:
            raise SweepError("sweep step must be positive")
        if stop < start:
            raise SweepError("sweep stop is below start")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        values = np.round(start + step * np.arange(n), 10)
        return cls(variable, tuple(values.tolist()), **kwargs)


def _preset_table():
    r = SweepSpec.from_range
    # unit steps where the K curves bend, coarser beyond; keeps both panels under a minute
    k_grid = tuple(range(1, 17)) + tuple(range(20, 129, 4))
    return {
        "fig4": r("transmit_power_db", 0, 20, 1, name="fig4"),
        "fig5": r("alpha", 2.0, 4.0, 0.1, name="fig5"),
        "fig6": r("n_b", 1, 128, 1, name="fig6"),
        "fig7a": SweepSpec("k_waveguides", k_grid, name="fig7a"),
        "fig7b": SweepSpec("k_waveguides", k_grid, overrides={"alpha": 2.0}, name="fig7b"),
        "fig8a": r("n_g", 1, 64, 1, name="fig8a"),
        "fig8b": r("n_g", 1, 64, 1, overrides={"alpha": 2.0}, name="fig8b"),
    }


PRESETS = _preset_table()
PRESET_GROUPS = {"fig7": ("fig7a", "fig7b"), "fig8": ("fig8a", "fig8b")}


def resolve_presets(name: str) -> list[SweepSpec]:
    if name in PRESET_GROUPS:
        return [PRESETS[n] for n in PRESET_GROUPS[name]]
    if name in PRESETS:
        return [PRESETS[name]]
    raise SweepError(f"unknown preset {name!r}; choose from {sorted([*PRESETS, *PRESET_GROUPS])}")


def apply_variable(cfg: SystemConfig, variable: str, value) -> SystemConfig:
    if variable == "transmit_power_db":
        return cfg.replace(P_t=float(10.0 ** (value / 10.0)))
    if variable == "alpha":
        return cfg.replace(alpha=float(value))
    if variable == "n_b":
        return cfg.replace(N_B=int(value))
    if variable == "k_waveguides":
        return cfg.replace(K=int(value))
    if variable == "n_g":
        return cfg.replace(N_G=int(value))
    raise SweepError(f"unknown sweep variable {variable!r}")


def check_placement(cfg: SystemConfig) -> None:
    """Run both placement solvers on the configured geometry (if any).

    Raises PlacementInfeasible when the waveguides cannot host N_G antennas.
    """
    if cfg.geometry is None:
        return
    wgs = waveguides_from_geometry(cfg.geometry)
    align_scd(wgs, cfg.geometry.ue, cfg)
    align_fcd(wgs, cfg.geometry.ue, cfg)


def _fmt(x) -> str:
    return "" if x is None else repr(float(x))


def sweep_rows(
    spec: SweepSpec,
    cfg: SystemConfig,
    trials: int | None = None,
    seed: int | None = None,
    *,
    phase_mode: str = "uniform",
    workers: int = 1,
) -> list[dict]:
    """Evaluate a sweep; rows come out in (value, scheme) order."""
    base = cfg.replace(**spec.overrides) if spec.overrides else cfg
    trials = base.trials if trials is None else int(trials)
    seed = base.seed if seed is None else int(seed)
    rows = []
    for value in spec.values:
        point = apply_variable(base, spec.variable, value)
        check_placement(point)
        mc = {}
        if spec.mc_enabled:
            mc = estimate_all(point, spec.schemes, trials, seed, phase_mode=phase_mode, workers=workers)
        for s in spec.schemes:
            est = mc.get(s)
            rows.append(
                {
                    "scheme": s.value,
                    "variable": spec.variable,
                    "value": value,
                    "analytic_snr_db": analytic_snr(s, point).snr_db,
                    "mc_snr_db": est.mean_snr_db if est else None,
                    "mc_stderr_db": est.std_error_db if est else None,
                    "trials": trials if est else None,
                    "seed": seed if est else None,
                }
            )
    return rows


def rows_to_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        value = r["value"]
        writer.writerow(
            [
                r["scheme"],
                r["variable"],
                str(value) if isinstance(value, int) else _fmt(value),
                _fmt(r["analytic_snr_db"]),
                _fmt(r["mc_snr_db"]),
                _fmt(r["mc_stderr_db"]),
                "" if r["trials"] is None else str(r["trials"]),
                "" if r["seed"] is None else str(r["seed"]),
            ]
        )
    return buf.getvalue()


def read_csv(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def write_manifest(path: Path, cfg: SystemConfig, outputs: dict, **run_options) -> Path:
    manifest = {
        "config_hash": config_hash(cfg, **run_options),
        "seed": run_options.get("seed", cfg.seed),
        "tool_version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "run_options": run_options,
        "outputs": {k: str(v) for k, v in outputs.items()},
    }
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def run_sweep(
    spec: SweepSpec,
    cfg: SystemConfig,
    out_dir,
    trials: int | None = None,
    seed: int | None = None,
    *,
    phase_mode: str = "uniform",
    workers: int = 1,
) -> Path:
    """Write ``<name>.csv`` and ``<name>.manifest.json`` into ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    trials = cfg.trials if trials is None else int(trials)
    seed = cfg.seed if seed is None else int(seed)
    rows = sweep_rows(spec, cfg, trials, seed, phase_mode=phase_mode, workers=workers)
    csv_path = out_dir / f"{spec.name}.csv"
    csv_path.write_text(rows_to_csv(rows), encoding="utf-8")
    write_manifest(
        out_dir / f"{spec.name}.manifest.json",
        cfg,
        {"csv": csv_path},
        sweep={
            "name": spec.name,
            "variable": spec.variable,
            "values": list(spec.values),
            "schemes": [s.value for s in spec.schemes],
            "mc_enabled": spec.mc_enabled,
            "overrides": spec.overrides,
        },
        trials=trials,
        seed=seed,
        phase_mode=phase_mode,
    )
    return csv_path
