"""Decision policies and campaign evaluation.

The scripted policy is a deterministic rule-based controller whose failure
topology mirrors a trained controller for the same task: it fails the task on
slow obstacles (it waits for them to pass, which slow ones never do in time)
and fails harmfully on high perceived goals (it stops waiting and drives
straight into the obstacle's path).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Protocol, Sequence

from .domain import Scenario, substream_seed
from .errors import ConfigError
from .estimator import TestCampaign, TrialRecord
from .simulator import Action, EnvConfig, Observation, run_episode


class Policy(Protocol):
    """Per-episode controller: reset once, then one action per observation."""

    def reset(self) -> None: ...

    def act(self, obs: Observation) -> Action: ...


PolicyFactory = Callable[[], Policy]


@dataclass(frozen=True)
class ScriptedPolicyParams:
    """Tuning knobs for the scripted policy.

    risk_goal_threshold splits episodes into a patient mode (wait below the
    danger zone until the obstacle passes) and an impatient mode (drive
    forward unconditionally). safe_ceiling is the highest position the
    patient mode will occupy before passage; with 5-inch steps and the
    danger zone starting at 25, that is 20. passed_margin widens the
    passage test: the obstacle counts as passed only once its perceived
    trailing edge is that many inches beyond the robot column.
    """

    risk_goal_threshold: float = 38.47
    safe_ceiling: float = 20.0
    passed_margin: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.risk_goal_threshold <= 50.0:
            raise ConfigError(
                f"risk_goal_threshold {self.risk_goal_threshold} outside [0, 50]"
            )
        if not 0.0 < self.safe_ceiling < 25.0:
            raise ConfigError(
                f"safe_ceiling {self.safe_ceiling} must lie in (0, 25)"
            )
        if self.passed_margin < 0:
            raise ConfigError("passed_margin must be non-negative")

    def as_dict(self) -> dict:
        return {
            "risk_goal_threshold": self.risk_goal_threshold,
            "safe_ceiling": self.safe_ceiling,
            "passed_margin": self.passed_margin,
        }


class ScriptedPolicy:
    """Goal-latching wait-then-go controller.

    The perceived goal is latched from the first observation, so the
    patient/impatient decision is a single noise draw per episode. Patient
    mode shuttles between safe_ceiling and one step below it until the
    perceived obstacle trailing edge clears the robot column, then drives
    forward to the top of the track. Impatient mode always drives forward.
    """

    def __init__(self, params: ScriptedPolicyParams = ScriptedPolicyParams(),
                 env: EnvConfig = EnvConfig()):
        if params.safe_ceiling >= env.danger_height:
            raise ConfigError(
                f"safe_ceiling {params.safe_ceiling} must stay below the danger "
                f"height {env.danger_height}"
            )
        self.params = params
        self.env = env
        self.reset()

    def reset(self) -> None:
        self._goal: float | None = None
        self._passed = False

    @property
    def latched_goal(self) -> float | None:
        return self._goal

    def act(self, obs: Observation) -> Action:
        p = self.params
        if self._goal is None:
            self._goal = obs.goal_noisy
        if self._goal >= p.risk_goal_threshold:
            return Action.FORWARD
        if not self._passed:
            trailing = obs.obstacle_pos_noisy + self.env.obstacle_width
            if trailing < -p.passed_margin:
                self._passed = True
        if self._passed:
            return Action.FORWARD
        if obs.robot_pos + self.env.step_inches <= p.safe_ceiling:
            return Action.FORWARD
        return Action.BACKWARD


def evaluate_policy(cfg: EnvConfig, policy_factory: PolicyFactory,
                    scenarios: Sequence[Scenario], master_seed: int, *,
                    condition_name: str = "", workers: int = 1) -> TestCampaign:
    """Run one episode per scenario with a fresh policy instance each.

    Episode i uses the substream seed derived from (master_seed, i), so the
    campaign is a pure function of its inputs and identical for any worker
    count or scheduling order.
    """
    seeds = [substream_seed(master_seed, i) for i in range(len(scenarios))]

    def one(i: int) -> TrialRecord:
        return run_episode(cfg, policy_factory(), scenarios[i], seeds[i])

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(one, range(len(scenarios))))
    else:
        records = [one(i) for i in range(len(scenarios))]
    return TestCampaign(
        condition_name=condition_name,
        records=tuple(records),
        master_seed=master_seed,
    )
