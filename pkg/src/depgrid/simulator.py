"""Deterministic robot/obstacle episode simulator.

A robot moves vertically on a 1-D track in fixed 5-inch steps, one step per
second. An obstacle crosses the robot's column horizontally at constant speed
v starting at time t; its bottom edge sits at the danger height, so any robot
position at or above that height is in its path while it occupies the column.
The robot's task is to reach or exceed the goal height y at some point during
the episode; colliding with the obstacle at any time is a harmful failure.

Episodes are pure functions of (config, policy, scenario, seed). Sensor noise
is redrawn at every observation from the episode's own generator.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .domain import Dimension, DomainSpace, Scenario
from .errors import ConfigError, EpisodeNotFinished, SteppingTerminatedEpisode
from .estimator import BehaviorMode, TrialRecord

# Scenario bounds for the obstacle dimensions; the goal dimension follows the
# robot track bounds in EnvConfig.
OBSTACLE_SPEED_RANGE = (0.0, 10.0)   # inches/second
START_TIME_RANGE = (0.0, 10.0)       # seconds


class Action(Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


@dataclass(frozen=True)
class EnvConfig:
    """Episode geometry, dynamics, and sensor-noise levels."""

    episode_seconds: int = 100
    step_inches: float = 5.0
    robot_bounds: tuple[float, float] = (0.0, 50.0)
    danger_height: float = 25.0
    obstacle_spawn_offset: float = 80.0
    obstacle_width: float = 10.0
    noise_sigma_speed: float = 0.1
    noise_sigma_obstacle_pos: float = 0.1
    noise_sigma_goal: float = 0.5

    def __post_init__(self):
        lo, hi = self.robot_bounds
        if not lo < self.danger_height < hi:
            raise ConfigError(
                f"danger height {self.danger_height} must lie strictly inside "
                f"robot bounds [{lo}, {hi}]"
            )
        for name in ("episode_seconds", "step_inches", "obstacle_spawn_offset",
                     "obstacle_width", "noise_sigma_speed",
                     "noise_sigma_obstacle_pos", "noise_sigma_goal"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative")


def scenario_domain(cfg: EnvConfig) -> DomainSpace:
    """The (v, t, y) box this environment accepts."""
    return DomainSpace((
        Dimension("v", *OBSTACLE_SPEED_RANGE, unit="in/s"),
        Dimension("t", *START_TIME_RANGE, unit="s"),
        Dimension("y", cfg.robot_bounds[0], cfg.robot_bounds[1], unit="in"),
    ))


@dataclass(frozen=True, slots=True)
class EnvState:
    """Snapshot after an integer number of elapsed seconds."""

    time: int
    robot_pos: float
    obstacle_leading_edge: float
    scenario: Scenario
    max_robot_pos: float
    collided: bool = False
    collision_time: float | None = None


@dataclass(frozen=True, slots=True)
class Observation:
    """What a policy sees each second. Robot position is exact; the obstacle
    position, obstacle speed, and goal carry fresh zero-mean Gaussian noise."""

    obstacle_pos_noisy: float
    robot_pos: float
    obstacle_speed_noisy: float
    goal_noisy: float


def _leading_edge(cfg: EnvConfig, x: Scenario, time: float) -> float:
    v, t, _ = x.values
    return cfg.obstacle_spawn_offset - v * max(0.0, time - t)


def init(cfg: EnvConfig, x: Scenario) -> EnvState:
    """Fresh episode state: robot at the track bottom, obstacle at spawn."""
    x.require_in(scenario_domain(cfg))
    start = cfg.robot_bounds[0]
    return EnvState(
        time=0,
        robot_pos=start,
        obstacle_leading_edge=_leading_edge(cfg, x, 0.0),
        scenario=x,
        max_robot_pos=start,
    )


def observe(cfg: EnvConfig, state: EnvState,
            rng: np.random.Generator) -> Observation:
    """One noisy sensor reading; draws three fresh standard normals in field
    order (obstacle position, obstacle speed, goal)."""
    eps = rng.standard_normal(3)
    return _observation(cfg, state, eps)


def _observation(cfg: EnvConfig, state: EnvState, eps) -> Observation:
    v, _, y = state.scenario.values
    return Observation(
        obstacle_pos_noisy=state.obstacle_leading_edge
        + cfg.noise_sigma_obstacle_pos * eps[0],
        robot_pos=state.robot_pos,
        obstacle_speed_noisy=v + cfg.noise_sigma_speed * eps[1],
        goal_noisy=y + cfg.noise_sigma_goal * eps[2],
    )


def step(cfg: EnvConfig, state: EnvState, a: Action) -> EnvState:
    """Advance one second: move the robot (clipped to the track), move the
    obstacle, then check collision at the new position. A collision freezes
    the episode."""
    if state.collided or state.time >= cfg.episode_seconds:
        raise SteppingTerminatedEpisode(
            f"episode already over at time {state.time}"
        )
    lo, hi = cfg.robot_bounds
    delta = cfg.step_inches if a is Action.FORWARD else -cfg.step_inches
    new_pos = min(max(state.robot_pos + delta, lo), hi)
    new_time = state.time + 1
    edge = _leading_edge(cfg, state.scenario, float(new_time))
    occupied = edge <= 0.0 < edge + cfg.obstacle_width
    collided = occupied and new_pos >= cfg.danger_height
    return EnvState(
        time=new_time,
        robot_pos=new_pos,
        obstacle_leading_edge=edge,
        scenario=state.scenario,
        max_robot_pos=max(state.max_robot_pos, new_pos),
        collided=collided,
        collision_time=float(new_time) if collided else None,
    )


def classify(cfg: EnvConfig, state: EnvState) -> BehaviorMode:
    """Behavior mode of a finished episode.

    Collision dominates regardless of goal progress; otherwise the episode
    succeeds if the robot ever reached or exceeded the goal height.
    """
    if not state.collided and state.time < cfg.episode_seconds:
        raise EpisodeNotFinished(
            f"episode at time {state.time} of {cfg.episode_seconds}"
        )
    if state.collided:
        return BehaviorMode.HARMFUL_FAILURE
    goal = state.scenario.values[2]
    if state.max_robot_pos >= goal:
        return BehaviorMode.SUCCESS
    return BehaviorMode.TASK_FAILURE


def run_episode(cfg: EnvConfig, policy, x: Scenario, seed: int) -> TrialRecord:
    """Observe/act/step until collision or the time limit, then classify.

    Noise for the whole episode is drawn up front from PCG64(seed) in
    observation order, which is bitwise-identical to drawing three normals
    per observe() call (numpy fills arrays from the stream in order).
    """
    state = init(cfg, x)
    policy.reset()
    rng = np.random.Generator(np.random.PCG64(seed))
    noise = rng.standard_normal((cfg.episode_seconds, 3))
    while not state.collided and state.time < cfg.episode_seconds:
        obs = _observation(cfg, state, noise[state.time])
        state = step(cfg, state, policy.act(obs))
    return TrialRecord(
        scenario=x,
        mode=classify(cfg, state),
        seed=int(seed),
        steps=state.time,
        final_position=state.robot_pos,
        collision_time=state.collision_time,
    )
