# Copyright (c) 2025 Bytedance Ltd. and/or its affiliates
# SPDX-License-Identifier: MIT

from .family import (
    DesiredCurveFamily,
    aggressiveness_schedule,
    morph_family,
    speed_schedule,
    track_builder,
    track_family,
)
from .quasi_static import DesiredCurve, equilibrium_samples, quasi_static
from .strategy import (
    EXTERNAL_INPUT_WEIGHT,
    ExplorationResult,
    LegResult,
    explore,
    initial_trajectory,
    load_external_curve,
    position_rms,
    projection_cost,
)
from .tracks import (
    BUILT_IN_TRACKS,
    DesiredPath,
    PathSpec,
    SpeedProfile,
    Track,
    TrackSegment,
    arc,
    chicane,
    load_track,
    loop,
    path_from_segments,
    path_to_pose,
    ramp,
    straight,
    turn,
    waypoint_path,
)

__all__ = [
    "TrackSegment",
    "PathSpec",
    "SpeedProfile",
    "Track",
    "DesiredPath",
    "BUILT_IN_TRACKS",
    "straight",
    "arc",
    "ramp",
    "turn",
    "path_from_segments",
    "path_to_pose",
    "waypoint_path",
    "chicane",
    "loop",
    "load_track",
    "DesiredCurve",
    "equilibrium_samples",
    "quasi_static",
    "DesiredCurveFamily",
    "aggressiveness_schedule",
    "speed_schedule",
    "morph_family",
    "track_builder",
    "track_family",
    "EXTERNAL_INPUT_WEIGHT",
    "LegResult",
    "ExplorationResult",
    "explore",
    "initial_trajectory",
    "projection_cost",
    "position_rms",
    "load_external_curve",
]
