"""Safety function: a goal-clipping observation governor.

The wrapper sits between the sensors and the policy and clips the perceived
goal into [0, goal_clip_max]. It changes only what the policy sees; episode
success is still judged against the true goal. For the scripted policy the
default clip keeps the perceived goal below the risk threshold, so the
impatient branch is never latched.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError
from .policies import Policy
from .simulator import Action, Observation

DEFAULT_RISK_THRESHOLD = 38.47
DEFAULT_DELTA = 0.5


@dataclass(frozen=True)
class SafetyFunction:
    """Clip bound for the goal input; default is risk threshold minus delta."""

    goal_clip_max: float = DEFAULT_RISK_THRESHOLD - DEFAULT_DELTA
    delta: float = DEFAULT_DELTA

    def __post_init__(self):
        if not 0.0 <= self.goal_clip_max <= 50.0:
            raise ConfigError(
                f"goal_clip_max {self.goal_clip_max} outside [0, 50]"
            )

    @classmethod
    def from_threshold(cls, threshold: float,
                       delta: float = DEFAULT_DELTA) -> "SafetyFunction":
        return cls(goal_clip_max=threshold - delta, delta=delta)

    def as_dict(self) -> dict:
        return {"goal_clip_max": self.goal_clip_max, "delta": self.delta}


class GoalClippedPolicy:
    """A policy whose perceived goal is clipped into [0, goal_clip_max]."""

    def __init__(self, inner: Policy, sf: SafetyFunction):
        self.inner = inner
        self.sf = sf

    def reset(self) -> None:
        self.inner.reset()

    def act(self, obs: Observation) -> Action:
        clipped = min(max(obs.goal_noisy, 0.0), self.sf.goal_clip_max)
        return self.inner.act(Observation(
            obstacle_pos_noisy=obs.obstacle_pos_noisy,
            robot_pos=obs.robot_pos,
            obstacle_speed_noisy=obs.obstacle_speed_noisy,
            goal_noisy=clipped,
        ))


def wrap(policy: Policy, sf: SafetyFunction) -> GoalClippedPolicy:
    """Wrap a policy with the goal governor. Idempotent in behavior: wrapping
    twice with the same bound clips to the same value."""
    return GoalClippedPolicy(policy, sf)
