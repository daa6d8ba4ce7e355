# Copyright (c) 2025 Bytedance Ltd. and/or its affiliates
# SPDX-License-Identifier: MIT

"""
Track geometry as piecewise-linear curvature profiles over arclength.

The heading is the exact (piecewise quadratic) integral of the curvature and
positions are Gauss-Legendre integrals of the unit tangent.
"""

import logging
from dataclasses import dataclass
from typing import List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError
from scipy import optimize
from scipy.interpolate import CubicSpline

from src.config.loader import load_yaml_config
from src.tire.types import FloatArray
from src.utils.exceptions import ConfigError, InvalidInputError

logger = logging.getLogger(__name__)

GAUSS_ORDER = 8
MAX_PANEL = 5.0  # longest quadrature panel [m]
CURVATURE_TOL = 1e-12


class TrackSegment(BaseModel):
    """One piece of a track: a straight, a constant arc or a curvature ramp."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["straight", "arc", "ramp"]
    length: float = Field(..., gt=0, description="Arclength [m]")
    curvature: float = Field(0.0, description="Arc curvature [1/m]")
    curvature_start: float = 0.0
    curvature_end: float = 0.0

    def endpoints(self) -> Tuple[float, float]:
        if self.kind == "straight":
            return 0.0, 0.0
        if self.kind == "arc":
            return self.curvature, self.curvature
        return self.curvature_start, self.curvature_end


@dataclass(frozen=True)
class PathSpec:
    """Initial pose and curvature knots sigma(s_i), linear in between."""

    s: FloatArray
    sigma: FloatArray
    x0: float = 0.0
    y0: float = 0.0
    theta0: float = 0.0

    def __post_init__(self):
        s = np.asarray(self.s, dtype=np.float64)
        sigma = np.asarray(self.sigma, dtype=np.float64)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "sigma", sigma)
        if s.ndim != 1 or s.size < 2 or s.shape != sigma.shape:
            raise InvalidInputError("Curvature profile needs matching knot arrays")
        if s[0] != 0.0 or np.any(np.diff(s) <= 0.0):
            raise InvalidInputError("Knots must start at 0 and increase strictly")
        if not np.all(np.isfinite(sigma)):
            raise InvalidInputError("Curvature must be finite")

    @property
    def length(self) -> float:
        return float(self.s[-1])

    def _check(self, s: FloatArray) -> FloatArray:
        s = np.asarray(s, dtype=np.float64)
        if np.any(s < -1e-9) or np.any(s > self.length + 1e-9):
            raise InvalidInputError(f"Arclength outside [0, {self.length}]")
        return np.clip(s, 0.0, self.length)

    def curvature(self, s) -> FloatArray:
        return np.interp(self._check(s), self.s, self.sigma)

    def heading(self, s) -> FloatArray:
        s = self._check(s)
        ds = np.diff(self.s)
        panels = 0.5 * ds * (self.sigma[:-1] + self.sigma[1:])
        cumulative = np.concatenate([[0.0], np.cumsum(panels)])
        i = np.clip(np.searchsorted(self.s, s, side="right") - 1, 0, self.s.size - 2)
        local = s - self.s[i]
        slope = (self.sigma[i + 1] - self.sigma[i]) / ds[i]
        return self.theta0 + cumulative[i] + self.sigma[i] * local + 0.5 * slope * local**2

    def _panels(self) -> FloatArray:
        edges = [self.s[:1]]
        for a, b in zip(self.s[:-1], self.s[1:]):
            count = int(np.ceil((b - a) / MAX_PANEL))
            edges.append(np.linspace(a, b, count + 1)[1:])
        return np.concatenate(edges)

    def _integrate(self, a: FloatArray, b: FloatArray) -> Tuple[FloatArray, FloatArray]:
        nodes, weights = np.polynomial.legendre.leggauss(GAUSS_ORDER)
        half = 0.5 * (b - a)
        points = (0.5 * (a + b))[..., None] + half[..., None] * nodes
        theta = self.heading(points)
        dx = half * np.sum(weights * np.cos(theta), axis=-1)
        dy = half * np.sum(weights * np.sin(theta), axis=-1)
        return dx, dy

    def position(self, s) -> Tuple[FloatArray, FloatArray]:
        """(x, y) of the path at arclength ``s``."""
        s = self._check(s)
        panels = self._panels()
        dx, dy = self._integrate(panels[:-1], panels[1:])
        cx = np.concatenate([[self.x0], self.x0 + np.cumsum(dx)])
        cy = np.concatenate([[self.y0], self.y0 + np.cumsum(dy)])
        i = np.clip(np.searchsorted(panels, s, side="right") - 1, 0, panels.size - 2)
        px, py = self._integrate(panels[i], s)
        return cx[i] + px, cy[i] + py


def path_from_segments(
    segments: Sequence[TrackSegment],
    x0: float = 0.0,
    y0: float = 0.0,
    theta0: float = 0.0,
) -> PathSpec:
    """Concatenate segments into curvature knots.

    Raises:
        InvalidInputError: the curvature jumps between two segments
    """
    if not segments:
        raise InvalidInputError("A track needs at least one segment")
    s = [0.0]
    sigma = [segments[0].endpoints()[0]]
    for index, segment in enumerate(segments):
        start, end = segment.endpoints()
        if abs(start - sigma[-1]) > CURVATURE_TOL:
            raise InvalidInputError(
                f"Curvature jumps from {sigma[-1]} to {start} at segment {index} "
                f"(s = {s[-1]:.3f} m); insert a ramp"
            )
        s.append(s[-1] + segment.length)
        sigma.append(end)
    return PathSpec(np.array(s), np.array(sigma), x0, y0, theta0)


def straight(length: float) -> TrackSegment:
    return TrackSegment(kind="straight", length=length)


def arc(length: float, curvature: float) -> TrackSegment:
    return TrackSegment(kind="arc", length=length, curvature=curvature)


def ramp(length: float, start: float, end: float) -> TrackSegment:
    return TrackSegment(
        kind="ramp", length=length, curvature_start=start, curvature_end=end
    )


def turn(radius: float, angle: float, transition: float) -> List[TrackSegment]:
    """Ramp in, constant arc and ramp out turning by ``angle`` (left if > 0)."""
    curvature = np.sign(angle) / radius
    arc_length = abs(angle) * radius - transition
    if arc_length <= 0.0:
        raise InvalidInputError("Transitions are too long for the turn angle")
    return [
        ramp(transition, 0.0, curvature),
        arc(arc_length, curvature),
        ramp(transition, curvature, 0.0),
    ]


@dataclass(frozen=True)
class SpeedProfile:
    """Speed as a piecewise-linear function of arclength."""

    s: FloatArray
    v: FloatArray

    def __post_init__(self):
        s = np.asarray(self.s, dtype=np.float64)
        v = np.asarray(self.v, dtype=np.float64)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "v", v)
        if s.ndim != 1 or s.size < 2 or s.shape != v.shape:
            raise InvalidInputError("Speed profile needs matching knot arrays")
        if s[0] != 0.0 or np.any(np.diff(s) <= 0.0):
            raise InvalidInputError("Speed knots must start at 0 and increase strictly")
        if np.any(v <= 0.0) or not np.all(np.isfinite(v)):
            raise InvalidInputError("Speeds must be positive and finite")

    @classmethod
    def constant(cls, speed: float, length: float) -> "SpeedProfile":
        return cls(np.array([0.0, length]), np.array([speed, speed]))

    @property
    def length(self) -> float:
        return float(self.s[-1])

    def speed(self, s) -> FloatArray:
        return np.interp(s, self.s, self.v)

    def mean(self) -> float:
        """Distance-weighted mean speed."""
        return float(np.trapezoid(self.v, self.s) / self.length)

    def scaled(self, aggressiveness: float) -> "SpeedProfile":
        """Deviation from the mean speed scaled by ``aggressiveness``."""
        mean = self.mean()
        return SpeedProfile(self.s, mean + aggressiveness * (self.v - mean))

    def with_offset(self, dv: float) -> "SpeedProfile":
        return SpeedProfile(self.s, self.v + dv)

    def _pieces(self):
        ds = np.diff(self.s)
        slope = np.diff(self.v) / ds
        flat = np.abs(slope) < 1e-12
        safe = np.where(flat, 1.0, slope)
        dt = np.where(flat, ds / self.v[:-1], np.log(self.v[1:] / self.v[:-1]) / safe)
        return slope, flat, safe, np.concatenate([[0.0], np.cumsum(dt)])

    def time_at(self, s) -> FloatArray:
        s = np.asarray(s, dtype=np.float64)
        slope, flat, safe, t_knots = self._pieces()
        i = np.clip(np.searchsorted(self.s, s, side="right") - 1, 0, self.s.size - 2)
        local = s - self.s[i]
        v0 = self.v[i]
        dt = np.where(flat[i], local / v0, np.log1p(safe[i] * local / v0) / safe[i])
        return t_knots[i] + dt

    def duration(self) -> float:
        return float(self._pieces()[3][-1])

    def arclength_at(self, t) -> FloatArray:
        """Inverse of ``time_at``: s = s0 + v0 (exp(g dt) - 1) / g on each piece."""
        t = np.asarray(t, dtype=np.float64)
        slope, flat, safe, t_knots = self._pieces()
        i = np.clip(np.searchsorted(t_knots, t, side="right") - 1, 0, self.s.size - 2)
        local = t - t_knots[i]
        v0 = self.v[i]
        ds = np.where(flat[i], v0 * local, v0 * np.expm1(safe[i] * local) / safe[i])
        return np.minimum(self.s[i] + ds, self.length)


@dataclass(frozen=True)
class Track:
    name: str
    path: PathSpec
    speed: SpeedProfile


@dataclass(frozen=True)
class DesiredPath:
    """Time samples of the reference path."""

    t: FloatArray
    s: FloatArray
    x: FloatArray
    y: FloatArray
    theta: FloatArray
    sigma: FloatArray
    v: FloatArray


def path_to_pose(spec: PathSpec, profile: SpeedProfile, dt: float) -> DesiredPath:
    """Sample the path in time, with ds = v(s) dt."""
    if dt <= 0.0:
        raise InvalidInputError(f"Step must be positive, got {dt}")
    if profile.length < spec.length - 1e-9:
        raise InvalidInputError("Speed profile is shorter than the path")
    duration = float(profile.time_at(spec.length))
    count = int(np.floor(duration / dt + 1e-9)) + 1
    if count < 2:
        raise InvalidInputError("Path is shorter than one time step")
    t = dt * np.arange(count)
    s = np.minimum(profile.arclength_at(t), spec.length)
    x, y = spec.position(s)
    return DesiredPath(
        t=t,
        s=s,
        x=x,
        y=y,
        theta=spec.heading(s),
        sigma=spec.curvature(s),
        v=profile.speed(s),
    )


def waypoint_path(points: Sequence[Sequence[float]], samples: int = 400) -> PathSpec:
    """Arclength cubic-spline fit through waypoints with analytic curvature."""
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[1] != 2 or points.shape[0] < 3:
        raise InvalidInputError("Need at least three (x, y) waypoints")
    chord = np.concatenate([[0.0], np.cumsum(np.hypot(*np.diff(points, axis=0).T))])
    if np.any(np.diff(chord) <= 0.0):
        raise InvalidInputError("Consecutive waypoints must differ")
    fx, fy = CubicSpline(chord, points[:, 0]), CubicSpline(chord, points[:, 1])
    p = np.linspace(0.0, chord[-1], samples)
    dx, dy = fx(p, 1), fy(p, 1)
    ddx, ddy = fx(p, 2), fy(p, 2)
    speed = np.hypot(dx, dy)
    sigma = (dx * ddy - dy * ddx) / speed**3
    s = np.concatenate([[0.0], np.cumsum(0.5 * np.diff(p) * (speed[1:] + speed[:-1]))])
    return PathSpec(
        s, sigma, float(points[0, 0]), float(points[0, 1]), float(np.arctan2(dy[0], dx[0]))
    )


def chicane() -> Track:
    """Straight, left arc, reversing ramp, right arc, straight (500 m)."""
    k = 1.0 / 80.0
    segments = [
        straight(100.0),
        ramp(30.0, 0.0, k),
        arc(60.0, k),
        ramp(60.0, k, -k),
        arc(60.0, -k),
        ramp(30.0, -k, 0.0),
        straight(160.0),
    ]
    path = path_from_segments(segments)
    speed = SpeedProfile(
        np.array([0.0, 100.0, 130.0, 310.0, 400.0, 500.0]),
        np.array([28.0, 21.0, 20.0, 20.0, 28.0, 28.0]),
    )
    return Track("chicane", path, speed)


def loop(speed: float = 30.0) -> Track:
    """Closed counter-clockwise course whose final turn is much tighter.

    Three wide turns (radius 120 m) and a final 40 m turn; the lengths of the
    last two straights are solved so that the course closes.
    """
    wide = turn(120.0, np.pi / 2, 20.0)
    tight = turn(40.0, np.pi / 2, 15.0)

    def build(c: float, d: float) -> List[TrackSegment]:
        return [
            straight(120.0),
            *wide,
            straight(80.0),
            *wide,
            straight(c),
            *wide,
            straight(d),
            *tight,
            straight(10.0),
        ]

    def gap(lengths: FloatArray) -> FloatArray:
        c, d = np.maximum(lengths, 1.0)
        path = path_from_segments(build(c, d))
        x, y = path.position(path.length)
        return np.array([x - 10.0, y])

    solution = optimize.root(gap, x0=np.array([150.0, 150.0]), method="hybr")
    if not solution.success:
        raise InvalidInputError(f"Loop closure failed: {solution.message}")
    c, d = solution.x
    path = path_from_segments(build(float(c), float(d)))
    logger.debug(f"Loop closed with straights {c:.3f} m and {d:.3f} m")
    return Track("loop", path, SpeedProfile.constant(speed, path.length))


BUILT_IN_TRACKS = {"chicane": chicane, "loop": loop}


def load_track(
    name_or_path: str,
    waypoints: Optional[Sequence[Sequence[float]]] = None,
    speed: Optional[float] = None,
) -> Track:
    """A built-in track, a segment file, or a waypoint list.

    Segment files are YAML with ``segments`` (kind, length, curvature or
    curvature_start/curvature_end), optional ``start: [x, y, heading]`` and
    optional ``speed`` knots ``[[s, v], ...]``.
    """
    if waypoints is not None:
        path = waypoint_path(waypoints)
        track = Track("waypoints", path, SpeedProfile.constant(speed or 20.0, path.length))
    elif name_or_path in BUILT_IN_TRACKS:
        track = BUILT_IN_TRACKS[name_or_path]()
    else:
        raw = load_yaml_config(name_or_path)
        if not raw:
            raise ConfigError(f"Unknown track '{name_or_path}'", field="explore.track")
        try:
            segments = [
                TrackSegment.model_validate(item) for item in raw.get("segments", [])
            ]
        except ValidationError as e:
            message = e.errors()[0]["msg"]
            raise ConfigError(
                f"Invalid track segment: {message}", field="segments"
            ) from e
        x0, y0, theta0 = raw.get("start", (0.0, 0.0, 0.0))
        path = path_from_segments(segments, x0, y0, theta0)
        knots = raw.get("speed")
        profile = (
            SpeedProfile(np.array(knots)[:, 0], np.array(knots)[:, 1])
            if knots
            else SpeedProfile.constant(speed or 20.0, path.length)
        )
        track = Track(str(raw.get("name", name_or_path)), path, profile)
    if speed is not None:
        profile = SpeedProfile.constant(speed, track.path.length)
        track = Track(track.name, track.path, profile)
    return track
