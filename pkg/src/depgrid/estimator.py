"""Outcome tallies and dependability metrics.

Three mutually exclusive behavior modes partition every trial: success,
task failure (task incomplete, no harm), harmful failure (harm caused,
task completion irrelevant). Dependability under a condition is the
probability of success when scenarios are drawn from that condition; the
two undependabilities are the probabilities of the failure modes.

Prediction re-weights per-region success/failure rates observed during
testing with the analytic region masses of the target condition. Counts are
kept as exact integers; division happens only at report time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np

from .domain import (
    Condition,
    DiscreteCondition,
    DomainSpace,
    PartitionGrid,
    Region,
    Scenario,
    partition_indices,
    region_mass,
)
from .errors import (
    DataError,
    EmptyCampaign,
    EmptyPartition,
    IncompleteOutcomes,
)

SUM_RULE_TOL = 1e-12


class BehaviorMode(str, Enum):
    SUCCESS = "success"
    TASK_FAILURE = "task_failure"
    HARMFUL_FAILURE = "harmful_failure"


@dataclass(frozen=True)
class TrialRecord:
    """Outcome of running a policy in one scenario."""

    scenario: Scenario
    mode: BehaviorMode
    seed: int
    steps: int
    final_position: float
    collision_time: float | None = None

    def __post_init__(self):
        if not isinstance(self.mode, BehaviorMode):
            try:
                object.__setattr__(self, "mode", BehaviorMode(self.mode))
            except ValueError:
                raise DataError(f"unknown behavior mode {self.mode!r}") from None
        harmful = self.mode is BehaviorMode.HARMFUL_FAILURE
        if harmful != (self.collision_time is not None):
            raise DataError(
                "collision_time must be present exactly for harmful failures"
            )


@dataclass(frozen=True)
class TestCampaign:
    """All trial records gathered under one condition and master seed."""

    __test__ = False  # not a pytest class, despite the name

    condition_name: str
    records: tuple[TrialRecord, ...]
    master_seed: int

    def __len__(self) -> int:
        return len(self.records)


@dataclass(frozen=True)
class PartitionTally:
    """Integer outcome counts for one region."""

    region: Region
    n_total: int
    n_success: int
    n_task_fail: int
    n_harmful: int

    def __post_init__(self):
        if self.n_success + self.n_task_fail + self.n_harmful != self.n_total:
            raise DataError(
                f"region {self.region.index}: mode counts do not sum to n_total"
            )

    @property
    def empty(self) -> bool:
        return self.n_total == 0

    @property
    def rates(self) -> tuple[float, float, float]:
        """(success, task-failure, harmful) rates; region must be non-empty."""
        if self.empty:
            raise DataError(f"region {self.region.index} has no samples")
        n = self.n_total
        return (self.n_success / n, self.n_task_fail / n, self.n_harmful / n)


@dataclass(frozen=True)
class RegionBreakdown:
    """One row of a report's per-region table."""

    region: Region
    mass: float
    n_total: int
    n_success: int
    n_task_fail: int
    n_harmful: int


@dataclass(frozen=True)
class DependabilityReport:
    """Dependability plus the two undependabilities under one condition.

    The three metrics sum to 1 (the modes are exhaustive and mutually
    exclusive). The only exception is a renormalized report whose covered
    mass was zero: it is vacuous, carries dropped_mass = 1, and all metrics
    are zero.
    """

    condition_name: str
    dependability: float
    task_undependability: float
    harmful_undependability: float
    per_region: tuple[RegionBreakdown, ...] = ()
    renormalized: bool = False
    dropped_mass: float = 0.0
    dropped_regions: tuple[Region, ...] = ()

    def __post_init__(self):
        for name, v in self.metrics().items():
            if not (-SUM_RULE_TOL <= v <= 1.0 + SUM_RULE_TOL):
                raise DataError(f"{name} = {v} outside [0, 1]")
        if self.dropped_mass < 1.0:
            total = (self.dependability + self.task_undependability
                     + self.harmful_undependability)
            if abs(total - 1.0) > SUM_RULE_TOL:
                raise DataError(f"metrics sum to {total!r}, violating the sum rule")

    def metrics(self) -> dict[str, float]:
        return {
            "dependability": self.dependability,
            "task_undependability": self.task_undependability,
            "harmful_undependability": self.harmful_undependability,
        }


@dataclass(frozen=True)
class MetricDeltas:
    """Signed predicted-minus-observed differences, in percentage points."""

    dependability_pts: float
    task_undependability_pts: float
    harmful_undependability_pts: float

    def as_dict(self) -> dict[str, float]:
        return {
            "dependability_pts": self.dependability_pts,
            "task_undependability_pts": self.task_undependability_pts,
            "harmful_undependability_pts": self.harmful_undependability_pts,
        }

    @property
    def max_abs(self) -> float:
        return max(abs(v) for v in self.as_dict().values())


# ---------------------------------------------------------------------------
# Tallying
# ---------------------------------------------------------------------------

_MODE_ORDER = (BehaviorMode.SUCCESS, BehaviorMode.TASK_FAILURE,
               BehaviorMode.HARMFUL_FAILURE)


def tally(campaign: TestCampaign, grid: PartitionGrid,
          space: DomainSpace) -> list[PartitionTally]:
    """Count outcomes per region. Every region appears, empty ones included.

    A record's scenario outside the domain raises OutOfDomain; mode counts
    partition the record set exactly.
    """
    n_regions = grid.n_regions
    counts = {m: np.zeros(n_regions, dtype=np.int64) for m in _MODE_ORDER}
    if campaign.records:
        xs = np.array([r.scenario.values for r in campaign.records])
        idx = partition_indices(grid, space, xs)
        keys = np.ravel_multi_index(idx.T, grid.bins)
        modes = np.array([_MODE_ORDER.index(r.mode) for r in campaign.records])
        for m_i, m in enumerate(_MODE_ORDER):
            counts[m] = np.bincount(keys[modes == m_i], minlength=n_regions)
    out = []
    for flat, region in enumerate(grid.iter_regions(space)):
        ns = int(counts[BehaviorMode.SUCCESS][flat])
        nt = int(counts[BehaviorMode.TASK_FAILURE][flat])
        nh = int(counts[BehaviorMode.HARMFUL_FAILURE][flat])
        out.append(PartitionTally(region, ns + nt + nh, ns, nt, nh))
    return out


def merge_tallies(parts: Iterable[Sequence[PartitionTally]]) -> list[PartitionTally]:
    """Merge partial tallies by integer addition (the parallel fold).

    All parts must cover the same region list in the same order; the result
    equals tallying the concatenated record sets sequentially, exactly.
    """
    parts = [list(p) for p in parts]
    if not parts:
        raise DataError("no tallies to merge")
    base = parts[0]
    for other in parts[1:]:
        if len(other) != len(base):
            raise DataError("tally lists cover different grids")
        merged = []
        for a, b in zip(base, other):
            if a.region.index != b.region.index:
                raise DataError("tally lists cover different grids")
            merged.append(PartitionTally(
                a.region,
                a.n_total + b.n_total,
                a.n_success + b.n_success,
                a.n_task_fail + b.n_task_fail,
                a.n_harmful + b.n_harmful,
            ))
        base = merged
    return base


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------

def observed_rates(campaign: TestCampaign) -> DependabilityReport:
    """Raw outcome fractions of a campaign (dependability under its own
    condition equals the fraction of successful tests)."""
    n = len(campaign.records)
    if n == 0:
        raise EmptyCampaign(f"campaign {campaign.condition_name!r} has no records")
    ns = sum(1 for r in campaign.records if r.mode is BehaviorMode.SUCCESS)
    nt = sum(1 for r in campaign.records if r.mode is BehaviorMode.TASK_FAILURE)
    nh = n - ns - nt
    return DependabilityReport(
        condition_name=campaign.condition_name,
        dependability=ns / n,
        task_undependability=nt / n,
        harmful_undependability=nh / n,
    )


def predict(tallies: Sequence[PartitionTally], target: Condition, *,
            renormalize_empty: bool = False) -> DependabilityReport:
    """Predicted metrics under ``target``: sum of mass-weighted region rates.

    Every region with positive target mass must contain test samples;
    otherwise EmptyPartition lists the uncovered regions. With
    ``renormalize_empty`` those regions are dropped instead, the remaining
    masses are renormalized, and the report records the deviation. Masses are
    normalized by their computed sum (analytically 1) so the three metrics
    obey the sum rule to floating precision.
    """
    if not tallies:
        raise EmptyCampaign("no tallies given")
    masses = np.array([region_mass(target, t.region) for t in tallies])
    if np.any(masses < 0):
        raise DataError("negative region mass")
    uncovered = [t.region for t, m in zip(tallies, masses) if m > 0 and t.empty]

    dropped_mass = 0.0
    dropped: tuple[Region, ...] = ()
    if uncovered:
        if not renormalize_empty:
            raise EmptyPartition(uncovered)
        keep = np.array([not (m > 0 and t.empty)
                         for t, m in zip(tallies, masses)])
        total_before = float(masses.sum())
        dropped_mass = float(masses[~keep].sum()) / total_before
        dropped = tuple(uncovered)
        masses = np.where(keep, masses, 0.0)

    total = float(masses.sum())
    counts = np.array([[t.n_success, t.n_task_fail, t.n_harmful, t.n_total]
                       for t in tallies], dtype=float)
    if total == 0.0:
        # Degenerate renormalization: the target has no mass over covered
        # regions. The report is vacuous and says so via dropped_mass = 1.
        weights = np.zeros(len(tallies))
        d = ut = uh = 0.0
        dropped_mass = 1.0
    else:
        weights = masses / total
        n_tot = np.where(counts[:, 3] > 0, counts[:, 3], 1.0)
        rates = counts[:, :3] / n_tot[:, None]
        rates[counts[:, 3] == 0] = 0.0  # zero-mass-and-empty regions only
        d, ut, uh = (float(weights @ rates[:, j]) for j in range(3))

    per_region = tuple(
        RegionBreakdown(t.region, float(w), t.n_total, t.n_success,
                        t.n_task_fail, t.n_harmful)
        for t, w in zip(tallies, weights)
    )
    return DependabilityReport(
        condition_name=getattr(target, "name", ""),
        dependability=d,
        task_undependability=ut,
        harmful_undependability=uh,
        per_region=per_region,
        renormalized=bool(uncovered),
        dropped_mass=dropped_mass,
        dropped_regions=dropped,
    )


def brute_force_dependability(
    policy_outcomes: Mapping[Scenario, BehaviorMode],
    cond: DiscreteCondition,
) -> DependabilityReport:
    """Exact expectation of the mode indicators over an explicit table.

    Serves as the independent oracle for the partition estimator on
    discrete-bounded domains: when each grid region holds exactly one table
    scenario, predict() must agree with this to floating precision.
    """
    missing = [s for s in cond.scenarios if s not in policy_outcomes]
    if missing:
        raise IncompleteOutcomes(
            f"{len(missing)} scenario(s) lack outcomes, e.g. {missing[0].values}"
        )
    total = math.fsum(cond.probabilities)
    acc = {m: 0.0 for m in _MODE_ORDER}
    for s, p in zip(cond.scenarios, cond.probabilities):
        acc[policy_outcomes[s]] += p
    return DependabilityReport(
        condition_name=cond.name,
        dependability=acc[BehaviorMode.SUCCESS] / total,
        task_undependability=acc[BehaviorMode.TASK_FAILURE] / total,
        harmful_undependability=acc[BehaviorMode.HARMFUL_FAILURE] / total,
    )


def compare(predicted: DependabilityReport,
            observed: DependabilityReport) -> MetricDeltas:
    """Signed per-metric differences in percentage points."""
    return MetricDeltas(
        dependability_pts=100.0 * (predicted.dependability - observed.dependability),
        task_undependability_pts=100.0 * (predicted.task_undependability
                                          - observed.task_undependability),
        harmful_undependability_pts=100.0 * (predicted.harmful_undependability
                                             - observed.harmful_undependability),
    )
