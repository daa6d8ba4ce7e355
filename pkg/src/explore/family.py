# Copyright (c) 2025 Bytedance Ltd. and/or its affiliates
# SPDX-License-Identifier: MIT

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterator, List, Literal, Optional, Sequence, Tuple

import numpy as np

from src.trajopt import Curve
from src.utils.exceptions import ExplorationError, InvalidInputError, LtcarError
from src.vehicle import CarModel

from .quasi_static import QuasiStaticMode, quasi_static
from .tracks import SpeedProfile, Track

logger = logging.getLogger(__name__)

ScheduleKind = Literal["aggressiveness", "speed", "single"]


@dataclass
class DesiredCurveFamily:
    """Desired curves ordered by their continuation parameter."""

    kind: ScheduleKind
    parameters: List[float] = field(default_factory=list)
    curves: List[Curve] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.curves)

    def __iter__(self) -> Iterator[Tuple[float, Curve]]:
        return iter(zip(self.parameters, self.curves))

    @property
    def target(self) -> Curve:
        return self.curves[-1]

    @classmethod
    def single(cls, curve: Curve, parameter: float = 1.0) -> "DesiredCurveFamily":
        return cls("single", [parameter], [curve])


def _ramp(start: float, stop: float, step: float) -> List[float]:
    count = int(round((stop - start) / step)) + 1
    if count < 1:
        raise InvalidInputError(f"Empty schedule from {start} to {stop}")
    return [float(v) for v in np.round(start + step * np.arange(count), 10)]


def aggressiveness_schedule(
    start: float = 0.5, stop: float = 1.0, step: float = 0.1
) -> List[float]:
    """Fractions of the target speed variation, 50% to 100% by default."""
    return _ramp(start, stop, step)


def speed_schedule(start: float = 25.0, stop: float = 30.0, step: float = 1.0) -> List[float]:
    """Constant speeds in m/s, 25 to 30 by default."""
    return _ramp(start, stop, step)


def morph_family(
    builder: Callable[[float], Curve],
    schedule: Sequence[float],
    kind: ScheduleKind = "single",
    threads: int = 1,
) -> DesiredCurveFamily:
    """Build one desired curve per schedule value.

    Curves are independent and may be built in parallel; the family keeps
    the order of ``schedule``.

    Raises:
        ExplorationError: the builder failed; ``leg`` is the schedule index
    """
    if len(schedule) == 0:
        raise InvalidInputError("Schedule is empty")
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        futures = [pool.submit(builder, value) for value in schedule]
        curves = []
        for index, (value, future) in enumerate(zip(schedule, futures)):
            try:
                curves.append(future.result())
            except LtcarError as e:
                raise ExplorationError(
                    f"Desired curve for parameter {value} failed: {e}", leg=index
                ) from e
    logger.info(f"Built {len(curves)} desired curves ({kind}: {list(schedule)})")
    return DesiredCurveFamily(kind, [float(v) for v in schedule], curves)


def track_builder(
    track: Track,
    model: CarModel,
    kind: ScheduleKind,
    dt: float = 0.01,
    tire_mode: QuasiStaticMode = "auto",
) -> Callable[[float], Curve]:
    """Quasi-static curve builder over a track for a schedule kind.

    ``aggressiveness`` scales the speed deviation from the mean, ``speed``
    replaces the profile by a constant speed and ``single`` ignores the
    parameter.
    """

    def profile_for(value: float) -> SpeedProfile:
        if kind == "aggressiveness":
            return track.speed.scaled(value)
        if kind == "speed":
            return SpeedProfile.constant(value, track.path.length)
        return track.speed

    def build(value: float) -> Curve:
        return quasi_static(track.path, profile_for(value), model, dt, tire_mode)

    return build


def track_family(
    track: Track,
    model: CarModel,
    kind: ScheduleKind = "aggressiveness",
    schedule: Optional[Sequence[float]] = None,
    dt: float = 0.01,
    tire_mode: QuasiStaticMode = "auto",
    threads: int = 1,
) -> DesiredCurveFamily:
    if schedule is None:
        schedule = {
            "aggressiveness": aggressiveness_schedule,
            "speed": speed_schedule,
            "single": lambda: [1.0],
        }[kind]()
    builder = track_builder(track, model, kind, dt, tire_mode)
    return morph_family(builder, schedule, kind, threads)
