"""depgrid: grid-partitioned dependability prediction under condition shift.

Tally a fixed policy's test outcomes per region of a partitioned domain,
then predict its success / task-failure / harmful-failure probabilities
under different operating conditions by re-weighting the per-region rates
with analytically computed region masses. Includes a deterministic
robot/obstacle simulator, a scripted reference policy, and a goal-clipping
safety governor to exercise the pipeline end to end.
"""

from .domain import (
    ClippedGaussian,
    ConditionSet,
    Dimension,
    DiscreteCondition,
    DomainSpace,
    PartitionGrid,
    Region,
    Scenario,
    Uniform,
    norm_cdf,
    partition_index,
    partition_indices,
    region_mass,
    sample,
    substream,
    substream_seed,
    validate_grid,
)
from .errors import (
    ConfigError,
    DataError,
    DepgridError,
    EmptyCampaign,
    EmptyPartition,
    EpisodeNotFinished,
    IncompleteOutcomes,
    InvalidGrid,
    OutOfDomain,
    SteppingTerminatedEpisode,
)
from .estimator import (
    BehaviorMode,
    DependabilityReport,
    MetricDeltas,
    PartitionTally,
    RegionBreakdown,
    TestCampaign,
    TrialRecord,
    brute_force_dependability,
    compare,
    merge_tallies,
    observed_rates,
    predict,
    tally,
)
from .policies import (
    Policy,
    ScriptedPolicy,
    ScriptedPolicyParams,
    evaluate_policy,
)
from .safety import GoalClippedPolicy, SafetyFunction, wrap
from .simulator import (
    Action,
    EnvConfig,
    EnvState,
    Observation,
    classify,
    init,
    observe,
    run_episode,
    scenario_domain,
    step,
)

__version__ = "0.1.0"
