"""Built-in domain, grid, and condition presets for the robot task.

Five condition sets over the (v, t, y) box: the uniform testing conditions
and four shifted operating conditions. The obstacle start time is uniform on
[0, 10] in all of them; the shifts act on obstacle speed and goal height.
"""

from __future__ import annotations

from .domain import (
    ClippedGaussian,
    ConditionSet,
    DomainSpace,
    PartitionGrid,
    Uniform,
)
from .errors import ConfigError
from .policies import ScriptedPolicyParams
from .simulator import EnvConfig, scenario_domain


def default_env() -> EnvConfig:
    return EnvConfig()


def domain_space() -> DomainSpace:
    return scenario_domain(default_env())


def default_grid() -> PartitionGrid:
    """10 equal bins per dimension: 1000 voxels over the (v, t, y) box."""
    return PartitionGrid((10, 10, 10))


def default_policy_params() -> ScriptedPolicyParams:
    return ScriptedPolicyParams()


def testing_conditions() -> ConditionSet:
    space = domain_space()
    return ConditionSet("testing", space, (
        Uniform(0.0, 10.0),
        Uniform(0.0, 10.0),
        Uniform(0.0, 50.0),
    ))


def operating_conditions_1() -> ConditionSet:
    """Low goals: the safe end of the goal range."""
    space = domain_space()
    return ConditionSet("oc1", space, (
        Uniform(0.0, 10.0),
        Uniform(0.0, 10.0),
        Uniform(0.0, 30.0),
    ))


def operating_conditions_2() -> ConditionSet:
    """High goals: the dangerous end of the goal range."""
    space = domain_space()
    return ConditionSet("oc2", space, (
        Uniform(0.0, 10.0),
        Uniform(0.0, 10.0),
        Uniform(30.0, 50.0),
    ))


def operating_conditions_3() -> ConditionSet:
    """Slow-leaning Gaussian speeds with high goals."""
    space = domain_space()
    return ConditionSet("oc3", space, (
        ClippedGaussian(3.0, 2.0),
        Uniform(0.0, 10.0),
        Uniform(30.0, 50.0),
    ))


def operating_conditions_4() -> ConditionSet:
    """Gaussian speeds and goals, both aimed at the observed failure zones."""
    space = domain_space()
    return ConditionSet("oc4", space, (
        ClippedGaussian(3.0, 2.0),
        Uniform(0.0, 10.0),
        ClippedGaussian(35.0, 10.0),
    ))


CONDITION_BUILDERS = {
    "testing": testing_conditions,
    "oc1": operating_conditions_1,
    "oc2": operating_conditions_2,
    "oc3": operating_conditions_3,
    "oc4": operating_conditions_4,
}

OPERATING_CONDITION_NAMES = ("oc1", "oc2", "oc3", "oc4")


def condition(name: str) -> ConditionSet:
    try:
        return CONDITION_BUILDERS[name]()
    except KeyError:
        raise ConfigError(
            f"unknown condition {name!r}; built-ins are "
            f"{sorted(CONDITION_BUILDERS)}"
        ) from None
