# Copyright (c) 2025 Bytedance Ltd. and/or its affiliates
# SPDX-License-Identifier: MIT

import numpy as np
import pytest

from src.config.loader import clear_config_cache
from src.explore import (
    PathSpec,
    SpeedProfile,
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
from src.utils.exceptions import ConfigError, InvalidInputError


def test_straight_path():
    """Test positions and heading of a straight"""
    path = path_from_segments([straight(100.0)], x0=1.0, y0=2.0)
    x, y = path.position(np.array([0.0, 50.0, 100.0]))
    np.testing.assert_allclose(x, [1.0, 51.0, 101.0])
    np.testing.assert_allclose(y, 2.0)
    np.testing.assert_allclose(path.heading([0.0, 100.0]), 0.0)


def test_arc_matches_circle():
    """Test that a constant-curvature arc follows the chord formula"""
    radius = 80.0
    path = path_from_segments([arc(150.0, 1.0 / radius)])
    s = np.linspace(0.0, 150.0, 37)
    x, y = path.position(s)
    np.testing.assert_allclose(x, radius * np.sin(s / radius), atol=1e-8)
    np.testing.assert_allclose(y, radius * (1.0 - np.cos(s / radius)), atol=1e-8)
    np.testing.assert_allclose(path.heading(s), s / radius, atol=1e-12)


def test_ramp_heading_is_quadratic():
    """Test the exact heading integral over a curvature ramp"""
    path = path_from_segments([ramp(40.0, 0.0, 0.02)])
    assert path.heading(40.0) == pytest.approx(0.4)
    assert path.heading(20.0) == pytest.approx(0.1)
    assert path.curvature(10.0) == pytest.approx(0.005)


def test_curvature_jump_is_rejected():
    """Test that segments must join with continuous curvature"""
    with pytest.raises(InvalidInputError, match="Curvature jumps"):
        path_from_segments([straight(10.0), arc(10.0, 0.1)])


def test_turn_angle():
    """Test that a turn with transitions turns by the requested angle"""
    path = path_from_segments(turn(120.0, np.pi / 2, 20.0))
    assert path.heading(path.length) == pytest.approx(np.pi / 2)
    right = path_from_segments(turn(40.0, -np.pi / 3, 10.0))
    assert right.heading(right.length) == pytest.approx(-np.pi / 3)
    with pytest.raises(InvalidInputError, match="too long"):
        turn(10.0, 0.1, 5.0)


def test_chicane_geometry():
    """Test that the chicane leaves with the heading it entered with"""
    track = chicane()
    assert track.path.length == pytest.approx(500.0)
    assert track.path.heading(500.0) == pytest.approx(0.0, abs=1e-12)
    knots = track.path.s[1:-1]
    np.testing.assert_allclose(
        track.path.heading(knots - 1e-9), track.path.heading(knots + 1e-9), atol=1e-9
    )
    assert np.max(np.abs(track.path.sigma)) == pytest.approx(1.0 / 80.0)
    assert track.speed.speed(200.0) == 20.0


def test_loop_closes():
    """Test that the loop returns to its start with one full turn"""
    track = loop()
    path = track.path
    x, y = path.position(path.length)
    assert x == pytest.approx(10.0, abs=1e-4)
    assert y == pytest.approx(0.0, abs=1e-4)
    assert path.heading(path.length) == pytest.approx(2.0 * np.pi)
    assert np.max(np.abs(path.sigma)) == pytest.approx(1.0 / 40.0)
    assert track.speed.mean() == pytest.approx(30.0)


def test_path_outside_range():
    """Test arclength queries beyond the path"""
    path = path_from_segments([straight(10.0)])
    with pytest.raises(InvalidInputError, match="outside"):
        path.position(11.0)


@pytest.mark.parametrize(
    "s, sigma",
    [([0.0], [0.0]), ([1.0, 2.0], [0.0, 0.0]), ([0.0, 1.0], [0.0, np.inf])],
)
def test_path_spec_validation(s, sigma):
    """Test knot validation of path specifications"""
    with pytest.raises(InvalidInputError):
        PathSpec(np.array(s), np.array(sigma))


def test_speed_profile_time_inverse():
    """Test that arclength_at inverts time_at on accelerating pieces"""
    profile = SpeedProfile(np.array([0.0, 100.0, 250.0]), np.array([20.0, 30.0, 30.0]))
    assert profile.time_at(100.0) == pytest.approx(np.log(1.5) / 0.1)
    assert profile.duration() == pytest.approx(np.log(1.5) / 0.1 + 5.0)
    s = np.linspace(0.0, 250.0, 51)
    np.testing.assert_allclose(profile.arclength_at(profile.time_at(s)), s, atol=1e-9)


def test_scaled_profile_keeps_mean():
    """Test aggressiveness scaling about the mean speed"""
    profile = chicane().speed
    half = profile.scaled(0.5)
    assert half.mean() == pytest.approx(profile.mean())
    np.testing.assert_allclose(profile.scaled(1.0).v, profile.v)
    np.testing.assert_allclose(half.v - profile.mean(), 0.5 * (profile.v - profile.mean()))
    assert profile.with_offset(2.0).v[0] == profile.v[0] + 2.0


def test_speed_profile_validation():
    """Test that speeds must be positive"""
    with pytest.raises(InvalidInputError, match="positive"):
        SpeedProfile(np.array([0.0, 10.0]), np.array([10.0, 0.0]))


def test_path_to_pose_constant_speed():
    """Test time sampling along a straight at constant speed"""
    path = path_from_segments([straight(100.0)])
    pose = path_to_pose(path, SpeedProfile.constant(20.0, 100.0), 0.1)
    assert pose.t.size == 51
    np.testing.assert_allclose(pose.s, 20.0 * pose.t, atol=1e-9)
    np.testing.assert_allclose(pose.x, pose.s, atol=1e-9)
    np.testing.assert_allclose(pose.v, 20.0)


def test_path_to_pose_short_profile():
    """Test that the speed profile must cover the path"""
    path = path_from_segments([straight(100.0)])
    with pytest.raises(InvalidInputError, match="shorter than the path"):
        path_to_pose(path, SpeedProfile.constant(20.0, 50.0), 0.1)


def test_waypoint_path_on_circle():
    """Test the spline curvature of waypoints sampled from a circle"""
    angles = np.linspace(0.0, np.pi, 13)
    points = np.column_stack([50.0 * np.sin(angles), 50.0 * (1.0 - np.cos(angles))])
    path = waypoint_path(points)
    assert path.length == pytest.approx(50.0 * np.pi, rel=1e-3)
    middle = path.curvature(np.linspace(0.3, 0.7, 9) * path.length)
    np.testing.assert_allclose(middle, 1.0 / 50.0, rtol=2e-2)
    with pytest.raises(InvalidInputError, match="at least three"):
        waypoint_path(points[:2])


def test_load_track_from_file(tmp_path):
    """Test reading a segment file with speed knots"""
    clear_config_cache()
    track_file = tmp_path / "bend.yaml"
    track_file.write_text(
        "name: bend\n"
        "start: [5.0, 0.0, 0.0]\n"
        "segments:\n"
        "  - {kind: straight, length: 50}\n"
        "  - {kind: ramp, length: 20, curvature_start: 0.0, curvature_end: 0.01}\n"
        "  - {kind: arc, length: 40, curvature: 0.01}\n"
        "speed: [[0, 20], [110, 25]]\n"
    )
    track = load_track(str(track_file))
    assert track.name == "bend"
    assert track.path.length == pytest.approx(110.0)
    assert track.path.position(0.0)[0] == pytest.approx(5.0)
    assert track.speed.speed(110.0) == pytest.approx(25.0)


def test_load_track_errors(tmp_path):
    """Test unknown names and invalid segments"""
    clear_config_cache()
    with pytest.raises(ConfigError, match="Unknown track"):
        load_track("no-such-track")
    bad = tmp_path / "bad.yaml"
    bad.write_text("segments:\n  - {kind: straight, length: -5}\n")
    with pytest.raises(ConfigError, match="Invalid track segment"):
        load_track(str(bad))


def test_load_track_speed_override():
    """Test replacing a built-in speed profile by a constant speed"""
    track = load_track("chicane", speed=25.0)
    assert track.name == "chicane"
    np.testing.assert_allclose(track.speed.v, 25.0)
