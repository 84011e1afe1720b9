"""System parameters, derived physical quantities and config-file I/O.

Everything inside the package is linear (W, m, rad). dB and dBm only appear
at the file/CLI boundary.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

import numpy as np
import tomli
import tomli_w

SPEED_OF_LIGHT = 299_792_458.0
SEED_ENV_VAR = "PINCHLINK_SEED"


class ConfigError(ValueError):
    """Invalid or unparseable run configuration."""


@dataclass(frozen=True)
class PhysicalConstants:
    c: float = SPEED_OF_LIGHT

    def __post_init__(self):
        if not self.c > 0:
            raise ConfigError(f"speed of light must be positive, got {self.c}")


@dataclass(frozen=True)
class Geometry:
    """Scenario geometry in meters.

    ``axis_directions`` defaults to +x for every waveguide and
    ``length_limits`` to 40 m, matching the façade-mounted layout used in the
    worked examples.
    """

    ue: tuple[float, float, float]
    feeds: tuple[tuple[float, float, float], ...]
    references: tuple[tuple[float, float, float], ...]
    axis_directions: Optional[tuple[tuple[float, float, float], ...]] = None
    length_limits: Optional[tuple[float, ...]] = None

    def __post_init__(self):
        if len(self.feeds) != len(self.references):
            raise ConfigError("geometry needs one reference position per feed")
        for name in ("axis_directions", "length_limits"):
            value = getattr(self, name)
            if value is not None and len(value) != len(self.feeds):
                raise ConfigError(f"geometry.{name} must have one entry per waveguide")
        pts = [self.ue, *self.feeds, *self.references, *(self.axis_directions or ())]
        for p in pts:
            if len(p) != 3 or not all(math.isfinite(v) for v in p):
                raise ConfigError(f"geometry point {p!r} must be three finite numbers")


@dataclass(frozen=True)
class SystemConfig:
    """All scalar symbols of the system model.

    Defaults reproduce the standard simulation parameter table
    (3.5 GHz, 64 BS antennas, 4 waveguides with 8 pinching antennas each).
    ``L_G_k`` optionally overrides ``L_G`` with one distance per waveguide.
    """

    f_c: float = 3.5e9
    n_eff: float = 1.5
    N_B: int = 64
    K: int = 4
    N_G: int = 8
    alpha: float = 2.4
    beta: float = 2.0
    L_B: float = 200.0
    L_G: float = 100.0
    L_G_k: Optional[tuple[float, ...]] = None
    P_t: float = 1.0
    noise_density_dbm_hz: float = -170.0
    bandwidth_hz: float = 100e6
    seed: int = 0
    trials: int = 10_000
    c: float = SPEED_OF_LIGHT
    geometry: Optional[Geometry] = None

    def __post_init__(self):
        PhysicalConstants(self.c)
        if self.f_c <= 0:
            raise ConfigError(f"carrier frequency must be positive, got {self.f_c}")
        if not self.n_eff > 1:
            raise ConfigError(f"n_eff must exceed 1, got {self.n_eff}")
        for name in ("N_B", "K", "N_G"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 1:
                raise ConfigError(f"{name} must be an integer >= 1, got {value!r}")
            object.__setattr__(self, name, int(value))
        if self.alpha <= 0 or self.beta <= 0:
            raise ConfigError("path-loss exponents must be positive")
        if self.L_B <= 0 or self.L_G <= 0:
            raise ConfigError("distances must be positive")
        if self.L_G_k is not None:
            dists = tuple(float(d) for d in self.L_G_k)
            if len(dists) != self.K:
                raise ConfigError(f"L_G_k needs K={self.K} entries, got {len(dists)}")
            if any(d <= 0 for d in dists):
                raise ConfigError("per-waveguide distances must be positive")
            object.__setattr__(self, "L_G_k", dists)
        if self.P_t <= 0:
            raise ConfigError("transmit power must be positive")
        if self.bandwidth_hz <= 0:
            raise ConfigError("bandwidth must be positive")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if self.geometry is not None and len(self.geometry.feeds) != self.K:
            raise ConfigError(
                f"geometry describes {len(self.geometry.feeds)} waveguides but K={self.K}"
            )

    @property
    def distances(self) -> np.ndarray:
        """Per-waveguide reference-antenna-to-UE distances, length K."""
        if self.L_G_k is not None:
            return np.asarray(self.L_G_k, dtype=float)
        return np.full(self.K, float(self.L_G))

    @property
    def equal_distances(self) -> bool:
        return self.L_G_k is None or len(set(self.L_G_k)) <= 1

    def replace(self, **changes) -> "SystemConfig":
        # K changes invalidate a per-waveguide override / geometry of the old size
        if "K" in changes and changes["K"] != self.K:
            changes.setdefault("L_G_k", None)
            changes.setdefault("geometry", None)
        return dataclasses.replace(self, **changes)


def wavelengths(cfg: SystemConfig) -> tuple[float, float]:
    """Free-space and guided wavelengths ``(c/f_c, c/(f_c n_eff))`` in meters."""
    if cfg.f_c <= 0:
        raise ConfigError("carrier frequency must be positive")
    lam = cfg.c / cfg.f_c
    return lam, lam / cfg.n_eff


def eta(cfg: SystemConfig) -> float:
    """Free-space gain constant ``c^2 / (16 pi^2 f_c^2)``, i.e. ``(lambda/4pi)^2``."""
    return cfg.c**2 / (16.0 * math.pi**2 * cfg.f_c**2)


def noise_power(cfg: SystemConfig) -> float:
    """Noise power in W from the dBm/Hz density and the bandwidth."""
    return 10.0 ** ((cfg.noise_density_dbm_hz - 30.0) / 10.0) * cfg.bandwidth_hz


def transmit_snr(cfg: SystemConfig) -> float:
    return cfg.P_t / noise_power(cfg)


def db(x):
    return 10.0 * np.log10(x)


def from_db(x):
    return 10.0 ** (np.asarray(x, dtype=float) / 10.0)


# -- file I/O ---------------------------------------------------------------

_SCALAR_KEYS = {f.name for f in dataclasses.fields(SystemConfig)} - {"geometry"}
_GEOMETRY_KEYS = {f.name for f in dataclasses.fields(Geometry)}
_INT_KEYS = {"N_B", "K", "N_G", "seed", "trials"}


def _as_point(value, where: str) -> tuple[float, float, float]:
    try:
        pt = tuple(float(v) for v in value)
    except TypeError as exc:
        raise ConfigError(f"{where}: expected a 3-vector, got {value!r}") from exc
    if len(pt) != 3:
        raise ConfigError(f"{where}: expected a 3-vector, got {value!r}")
    return pt


def _parse_geometry(table: dict[str, Any]) -> Geometry:
    unknown = set(table) - _GEOMETRY_KEYS
    if unknown:
        raise ConfigError(f"unknown geometry keys: {sorted(unknown)}")
    for key in ("ue", "feeds", "references"):
        if key not in table:
            raise ConfigError(f"geometry block is missing '{key}'")
    kwargs: dict[str, Any] = {
        "ue": _as_point(table["ue"], "geometry.ue"),
        "feeds": tuple(_as_point(p, "geometry.feeds") for p in table["feeds"]),
        "references": tuple(_as_point(p, "geometry.references") for p in table["references"]),
    }
    if "axis_directions" in table:
        kwargs["axis_directions"] = tuple(
            _as_point(p, "geometry.axis_directions") for p in table["axis_directions"]
        )
    if "length_limits" in table:
        kwargs["length_limits"] = tuple(float(v) for v in table["length_limits"])
    return Geometry(**kwargs)


def config_from_dict(data: dict[str, Any]) -> SystemConfig:
    data = dict(data)
    geometry = data.pop("geometry", None)
    unknown = set(data) - _SCALAR_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    kwargs: dict[str, Any] = {}
    for key, value in data.items():
        if key == "L_G_k":
            if not isinstance(value, (list, tuple)):
                raise ConfigError("L_G_k must be a list of distances")
            kwargs[key] = tuple(float(v) for v in value)
        elif key in _INT_KEYS:
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"{key} must be an integer, got {value!r}")
            kwargs[key] = value
        else:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"{key} must be a number, got {value!r}")
            kwargs[key] = float(value)
    if geometry is not None:
        if not isinstance(geometry, dict):
            raise ConfigError("geometry must be a table")
        kwargs["geometry"] = _parse_geometry(geometry)
    return SystemConfig(**kwargs)


def config_to_dict(cfg: SystemConfig) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for f in dataclasses.fields(cfg):
        value = getattr(cfg, f.name)
        if value is None:
            continue
        if f.name == "geometry":
            geo = {
                g.name: getattr(value, g.name)
                for g in dataclasses.fields(value)
                if getattr(value, g.name) is not None
            }
            out["geometry"] = json.loads(json.dumps(geo))  # tuples -> lists
        elif isinstance(value, tuple):
            out[f.name] = list(value)
        else:
            out[f.name] = value
    return out


def load_config(path: str | os.PathLike | None = None, *, env: bool = True) -> SystemConfig:
    """Read a TOML config; missing keys fall back to the default parameter set.

    ``PINCHLINK_SEED`` in the environment overrides the seed when ``env`` is true.
    """
    data: dict[str, Any] = {}
    if path is not None:
        try:
            data = tomli.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, UnicodeDecodeError, tomli.TOMLDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if env and os.environ.get(SEED_ENV_VAR):
        try:
            data["seed"] = int(os.environ[SEED_ENV_VAR])
        except ValueError as exc:
            raise ConfigError(f"{SEED_ENV_VAR} must be an integer") from exc
    return config_from_dict(data)


def dumps_config(cfg: SystemConfig) -> str:
    return tomli_w.dumps(config_to_dict(cfg))


def save_config(cfg: SystemConfig, path: str | os.PathLike) -> None:
    Path(path).write_text(dumps_config(cfg), encoding="utf-8")


def config_hash(cfg: SystemConfig, **extra: Any) -> str:
    """SHA-256 over the canonical JSON of the config plus any run options."""
    payload = {"config": config_to_dict(cfg), "extra": extra}
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()
