from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from depgrid import EnvConfig, ScriptedPolicy, ScriptedPolicyParams
from depgrid import presets

settings.register_profile(
    "suite",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def env() -> EnvConfig:
    return presets.default_env()


@pytest.fixture(scope="session")
def params() -> ScriptedPolicyParams:
    return presets.default_policy_params()


@pytest.fixture(scope="session")
def space():
    return presets.domain_space()


@pytest.fixture(scope="session")
def grid():
    return presets.default_grid()


@pytest.fixture
def scripted_factory(env, params):
    return lambda: ScriptedPolicy(params, env)


# Forces patient mode for goals comfortably below 50: with sigma_goal = 0.5
# a perceived goal of 50 is dozens of sigmas away for y <= 45 or so. Not a
# guarantee for y near the top of the track.
@pytest.fixture
def patient_factory(env):
    p = ScriptedPolicyParams(risk_goal_threshold=50.0)
    return lambda: ScriptedPolicy(p, env)
