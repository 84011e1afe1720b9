"""Phase delays and pinching-antenna placement along straight waveguides.

A waveguide is a line through its feed point. Positions on it are described
by the axial coordinate ``t >= 0`` measured from the feed, so the in-guide
path length is simply ``t``. Because ``lambda_G < lambda``, the total phase

    psi(t) = 2 pi |p(t) - u| / lambda + 2 pi t / lambda_G

is strictly increasing in ``t`` (the free-space term changes at most at rate
2 pi / lambda). Every "phase congruent to X mod 2 pi" problem therefore
reduces to solving ``psi(t) = level`` on a monotone function.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import brentq

from .config import Geometry, SystemConfig, wavelengths

TWO_PI = 2.0 * math.pi
PHASE_TOL = 1e-6  # rad, "equal mod 2 pi"
_ON_AXIS_TOL = 1e-9  # m
_STEPS_PER_GUIDED_WAVELENGTH = 20


class PlacementInfeasible(RuntimeError):
    """No position on the waveguide satisfies the requested phase condition."""


class Point3(NamedTuple):
    x: float
    y: float
    z: float

    @classmethod
    def of(cls, p) -> "Point3":
        x, y, z = (float(v) for v in p)
        return cls(x, y, z)

    def array(self) -> np.ndarray:
        return np.array(self, dtype=float)


def wrap_phase(x):
    """Map angles to (-pi, pi]."""
    y = np.mod(np.asarray(x, dtype=float) + math.pi, TWO_PI) - math.pi
    y = np.where(y == -math.pi, math.pi, y)
    return float(y) if np.ndim(y) == 0 else y


def phase_distance(a, b):
    """Absolute angular distance between ``a`` and ``b`` modulo 2 pi, in [0, pi]."""
    return np.abs(wrap_phase(np.asarray(a) - np.asarray(b)))


def phase_delay(antenna, feed, ue, cfg: SystemConfig) -> float:
    """Unwrapped free-space plus in-guide phase delay of one antenna, in radians."""
    lam, lam_g = wavelengths(cfg)
    a = np.asarray(antenna, dtype=float)
    free = np.linalg.norm(a - np.asarray(ue, dtype=float))
    guided = np.linalg.norm(a - np.asarray(feed, dtype=float))
    return float(TWO_PI * free / lam + TWO_PI * guided / lam_g)


@dataclass(frozen=True)
class WaveguideSpec:
    """Straight waveguide fed at ``feed`` and running along ``axis_direction``.

    ``axis_origin`` defaults to the feed; the feed must lie on the axis.
    ``length_limit`` bounds the usable axial coordinate to ``[0, length_limit]``.
    """

    feed: Point3
    reference_position: Point3
    axis_direction: Point3 = Point3(1.0, 0.0, 0.0)
    length_limit: float = 40.0
    axis_origin: Point3 | None = None

    def __post_init__(self):
        feed = Point3.of(self.feed)
        d = np.asarray(self.axis_direction, dtype=float)
        norm = np.linalg.norm(d)
        if not np.all(np.isfinite(d)) or norm == 0:
            raise ValueError(f"invalid axis direction {self.axis_direction!r}")
        d = d / norm
        origin = Point3.of(self.axis_origin) if self.axis_origin is not None else feed
        object.__setattr__(self, "feed", feed)
        object.__setattr__(self, "axis_direction", Point3.of(d))
        object.__setattr__(self, "axis_origin", origin)
        object.__setattr__(self, "reference_position", Point3.of(self.reference_position))
        if self._off_axis(feed) > _ON_AXIS_TOL:
            raise ValueError("feed point must lie on the waveguide axis")
        if self._off_axis(self.reference_position) > _ON_AXIS_TOL:
            raise ValueError("reference antenna must lie on the waveguide axis")
        t_ref = self.axial(self.reference_position)
        if not (-_ON_AXIS_TOL <= t_ref <= self.length_limit + _ON_AXIS_TOL):
            raise ValueError(
                f"reference sits at axial offset {t_ref:.6g} m, outside [0, {self.length_limit}]"
            )

    def _off_axis(self, p) -> float:
        v = np.asarray(p, dtype=float) - np.asarray(self.axis_origin)
        d = np.asarray(self.axis_direction)
        return float(np.linalg.norm(v - np.dot(v, d) * d))

    def axial(self, p) -> float:
        """Axial coordinate of an on-axis point, measured from the feed."""
        return float(np.dot(np.asarray(p, float) - np.asarray(self.feed), self.axis_direction))

    def point(self, t):
        """Point(s) at axial coordinate(s) ``t``; returns shape ``(..., 3)``."""
        t = np.asarray(t, dtype=float)
        return np.asarray(self.feed) + t[..., None] * np.asarray(self.axis_direction)

    @property
    def reference_offset(self) -> float:
        return self.axial(self.reference_position)

    def with_reference(self, p) -> "WaveguideSpec":
        return dataclasses.replace(self, reference_position=Point3.of(p))


@dataclass(frozen=True)
class PlacementResult:
    """Antenna positions on one waveguide, all phase-congruent to the anchor.

    ``phases`` are the unwrapped total phase delays of each antenna;
    ``phases[n] - phases[0] == 2 pi * integer_offsets[n]``.
    """

    positions: tuple[Point3, ...]
    phase_anchor: float
    integer_offsets: tuple[int, ...]
    phases: tuple[float, ...]
    reference_shift: float = 0.0

    @property
    def reference(self) -> Point3:
        return self.positions[0]

    @property
    def n_antennas(self) -> int:
        return len(self.positions)

    def max_congruence_error(self) -> float:
        return float(np.max(phase_distance(np.asarray(self.phases), self.phase_anchor)))


def axial_phase(wg: WaveguideSpec, ue, t, cfg: SystemConfig):
    """Total phase delay at axial coordinate(s) ``t`` (vectorised)."""
    lam, lam_g = wavelengths(cfg)
    t = np.asarray(t, dtype=float)
    pts = wg.point(t)
    free = np.linalg.norm(pts - np.asarray(ue, dtype=float), axis=-1)
    guided = np.linalg.norm(pts - np.asarray(wg.feed), axis=-1)
    out = TWO_PI * free / lam + TWO_PI * guided / lam_g
    return float(out) if out.ndim == 0 else out


def _solve_level(wg, ue, level, t_start, direction, cfg):
    """Axial coordinate nearest ``t_start`` (in ``direction``) where psi == level.

    Walks in steps of lambda_G/20 until psi crosses ``level``, then refines the
    bracket with Brent's method. Returns None if the waveguide ends first.
    """
    _, lam_g = wavelengths(cfg)
    step = lam_g / _STEPS_PER_GUIDED_WAVELENGTH
    lo_lim, hi_lim = 0.0, wg.length_limit

    def f(t):
        return axial_phase(wg, ue, t, cfg) - level

    a = min(max(t_start, lo_lim), hi_lim)
    fa = f(a)
    if fa == 0.0:
        return a
    while True:
        b = a + direction * step
        b = min(max(b, lo_lim), hi_lim)
        if b == a:
            return None
        fb = f(b)
        if fb == 0.0:
            return b
        if (fa < 0) != (fb < 0):
            lo, hi = (a, b) if a < b else (b, a)
            return brentq(f, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=200)
        a, fa = b, fb


def nearest_phase_position(
    wg: WaveguideSpec, ue, target_phase: float, cfg: SystemConfig
) -> Point3:
    """Nearest on-axis point to the current reference with phase == target (mod 2 pi).

    Searches left (toward the feed) and right; the right candidate wins ties.
    """
    t0 = wg.reference_offset
    psi0 = axial_phase(wg, ue, t0, cfg)
    excess = float(np.mod(psi0 - target_phase, TWO_PI))
    if excess < PHASE_TOL or TWO_PI - excess < PHASE_TOL:
        return wg.reference_position
    left = _solve_level(wg, ue, psi0 - excess, t0, -1, cfg)
    right = _solve_level(wg, ue, psi0 + (TWO_PI - excess), t0, +1, cfg)
    if left is None and right is None:
        raise PlacementInfeasible(
            f"no position with phase {target_phase:.6f} rad within the waveguide"
        )
    if right is None:
        t = left
    elif left is None:
        t = right
    else:
        t = right if abs(left - t0) >= abs(right - t0) else left
    return Point3.of(wg.point(t))


def place_intra_waveguide(
    wg: WaveguideSpec, ue, cfg: SystemConfig, n_antennas: int | None = None
) -> PlacementResult:
    """Place ``N_G`` antennas starting at the reference, extending away from the feed.

    Antenna ``n`` sits at the first point beyond antenna ``n-1`` whose phase is
    the reference phase plus ``2 pi (n-1)``.
    """
    n = cfg.N_G if n_antennas is None else int(n_antennas)
    if n < 1:
        raise ValueError("need at least one antenna")
    t = wg.reference_offset
    psi_ref = axial_phase(wg, ue, t, cfg)
    offsets = [t]
    phases = [psi_ref]
    for k in range(1, n):
        t_next = _solve_level(wg, ue, psi_ref + TWO_PI * k, offsets[-1], +1, cfg)
        if t_next is None:
            raise PlacementInfeasible(
                f"waveguide of length {wg.length_limit} m fits only {k} of {n} antennas"
            )
        offsets.append(t_next)
        phases.append(axial_phase(wg, ue, t_next, cfg))
    positions = tuple(Point3.of(wg.point(ti)) for ti in offsets)
    return PlacementResult(
        positions=positions,
        phase_anchor=float(np.mod(psi_ref, TWO_PI)),
        integer_offsets=tuple(range(n)),
        phases=tuple(float(p) for p in phases),
    )


def _retarget(wg, ue, target, cfg, n_antennas):
    new_ref = nearest_phase_position(wg, ue, target, cfg)
    shift = float(np.linalg.norm(np.asarray(new_ref) - np.asarray(wg.reference_position)))
    placed = place_intra_waveguide(wg.with_reference(new_ref), ue, cfg, n_antennas)
    return dataclasses.replace(placed, reference_shift=shift)


def align_scd(
    waveguides: Sequence[WaveguideSpec], ue, cfg: SystemConfig, n_antennas: int | None = None
) -> list[PlacementResult]:
    """Semi-cooperative placement: every waveguide adopts waveguide 1's phase anchor."""
    if not waveguides:
        raise ValueError("need at least one waveguide")
    first = place_intra_waveguide(waveguides[0], ue, cfg, n_antennas)
    out = [first]
    for wg in waveguides[1:]:
        out.append(_retarget(wg, ue, first.phase_anchor, cfg, n_antennas))
    return out


def align_fcd(
    waveguides: Sequence[WaveguideSpec], ue, cfg: SystemConfig, n_antennas: int | None = None
) -> list[PlacementResult]:
    """Full-cooperative placement: every phase anchor moved to 0 mod 2 pi."""
    if not waveguides:
        raise ValueError("need at least one waveguide")
    return [_retarget(wg, ue, 0.0, cfg, n_antennas) for wg in waveguides]


def waveguides_from_geometry(geometry: Geometry) -> list[WaveguideSpec]:
    dirs = geometry.axis_directions or [(1.0, 0.0, 0.0)] * len(geometry.feeds)
    limits = geometry.length_limits or [40.0] * len(geometry.feeds)
    return [
        WaveguideSpec(
            feed=Point3.of(f),
            reference_position=Point3.of(r),
            axis_direction=Point3.of(d),
            length_limit=float(lim),
        )
        for f, r, d, lim in zip(geometry.feeds, geometry.references, dirs, limits)
    ]
