"""Domain spaces, condition distributions, and grid partitions.

The domain is a bounded continuous box. A condition set assigns one marginal
distribution per dimension (an independent product distribution); Gaussian
marginals are clipped to the dimension bounds, which places point atoms of
probability on the boundary values. Region masses under any condition set are
computed analytically, so they never require sampling or simulation.

Bin-edge convention: every bin is half-open [lo, hi) except the last bin of
each dimension, which is closed [lo, hi]. A value lying exactly on an interior
edge belongs to the higher bin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Union

import numpy as np

from .errors import ConfigError, InvalidGrid, OutOfDomain

_SQRT2 = math.sqrt(2.0)


def norm_cdf(z: float) -> float:
    """Standard normal CDF via erfc (absolute error well below 1e-12)."""
    if z == math.inf:
        return 1.0
    if z == -math.inf:
        return 0.0
    return 0.5 * math.erfc(-z / _SQRT2)


# ---------------------------------------------------------------------------
# Domain geometry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Dimension:
    """One bounded axis of the domain, e.g. obstacle speed in [0, 10] in/s."""

    name: str
    min: float
    max: float
    unit: str = ""

    def __post_init__(self):
        if not self.name:
            raise ConfigError("dimension name must be non-empty")
        if not (math.isfinite(self.min) and math.isfinite(self.max)):
            raise ConfigError(f"dimension {self.name!r}: bounds must be finite")
        if not self.min < self.max:
            raise ConfigError(
                f"dimension {self.name!r}: min ({self.min}) must be < max ({self.max})"
            )

    @property
    def width(self) -> float:
        return self.max - self.min

    @property
    def label(self) -> str:
        return f"{self.name} [{self.unit}]" if self.unit else self.name


@dataclass(frozen=True)
class DomainSpace:
    """An ordered tuple of dimensions; the box they span is the domain."""

    dims: tuple[Dimension, ...]

    def __post_init__(self):
        if not self.dims:
            raise ConfigError("domain space needs at least one dimension")
        names = [d.name for d in self.dims]
        if len(set(names)) != len(names):
            raise ConfigError(f"dimension names must be unique, got {names}")

    @property
    def ndim(self) -> int:
        return len(self.dims)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(d.name for d in self.dims)

    def index_of(self, name: str) -> int:
        for i, d in enumerate(self.dims):
            if d.name == name:
                return i
        raise ConfigError(f"unknown dimension {name!r}; domain has {self.names}")

    def check_values(self, values) -> None:
        """Raise OutOfDomain unless every coordinate is within its bounds."""
        if len(values) != self.ndim:
            raise OutOfDomain(
                f"scenario has {len(values)} values, domain has {self.ndim} dimensions"
            )
        for v, d in zip(values, self.dims):
            if not (d.min <= v <= d.max):
                raise OutOfDomain(
                    f"{d.name} = {v} outside [{d.min}, {d.max}]"
                )


@dataclass(frozen=True)
class Scenario:
    """One point of the domain, in dimension order. Hashable."""

    values: tuple[float, ...]

    @classmethod
    def of(cls, *values: float) -> "Scenario":
        return cls(tuple(float(v) for v in values))

    def require_in(self, space: DomainSpace) -> None:
        space.check_values(self.values)


# ---------------------------------------------------------------------------
# Marginal distributions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Uniform:
    """Uniform(a, b). Support must lie inside the dimension bounds."""

    a: float
    b: float

    kind = "uniform"

    def __post_init__(self):
        if not self.a < self.b:
            raise ConfigError(f"uniform: a ({self.a}) must be < b ({self.b})")

    def validate_for(self, dim: Dimension) -> None:
        if self.a < dim.min or self.b > dim.max:
            raise ConfigError(
                f"uniform support [{self.a}, {self.b}] exceeds "
                f"{dim.name} bounds [{dim.min}, {dim.max}]"
            )

    def interval_mass(self, dim: Dimension, lo: float, hi: float,
                      first: bool, last: bool) -> float:
        overlap = min(hi, self.b) - max(lo, self.a)
        return max(0.0, overlap) / (self.b - self.a)

    def draw(self, rng: np.random.Generator, dim: Dimension) -> float:
        return float(rng.uniform(self.a, self.b))

    def params(self) -> dict:
        return {"a": self.a, "b": self.b}


@dataclass(frozen=True)
class ClippedGaussian:
    """Gaussian(mu, sigma) with samples clipped to the dimension bounds.

    Clipping moves out-of-range probability onto atoms at the boundary
    values, so the first and last bins of a partition absorb the lower and
    upper tail mass respectively.
    """

    mu: float
    sigma: float

    kind = "clipped_gaussian"

    def __post_init__(self):
        if not self.sigma > 0:
            raise ConfigError(f"clipped gaussian: sigma ({self.sigma}) must be > 0")

    def validate_for(self, dim: Dimension) -> None:
        pass  # any mu/sigma is legal; clipping handles the tails

    def interval_mass(self, dim: Dimension, lo: float, hi: float,
                      first: bool, last: bool) -> float:
        zlo = -math.inf if first else (lo - self.mu) / self.sigma
        zhi = math.inf if last else (hi - self.mu) / self.sigma
        return norm_cdf(zhi) - norm_cdf(zlo)

    def draw(self, rng: np.random.Generator, dim: Dimension) -> float:
        return float(min(max(rng.normal(self.mu, self.sigma), dim.min), dim.max))

    def params(self) -> dict:
        return {"mu": self.mu, "sigma": self.sigma}


MarginalDistribution = Union[Uniform, ClippedGaussian]


# ---------------------------------------------------------------------------
# Partition grid and regions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Region:
    """One cell of a partition grid.

    ``bounds`` are half-open per dimension except where ``is_last`` marks the
    closed final bin. A region is self-describing: mass computations need no
    back-reference to the grid.
    """

    index: tuple[int, ...]
    bounds: tuple[tuple[float, float], ...]
    is_first: tuple[bool, ...]
    is_last: tuple[bool, ...]

    def contains(self, values) -> bool:
        for v, (lo, hi), last in zip(values, self.bounds, self.is_last):
            if not (lo <= v <= hi if last else lo <= v < hi):
                return False
        return True


@dataclass(frozen=True)
class PartitionGrid:
    """Equal-width bin counts per dimension; edges are implied by the space."""

    bins: tuple[int, ...]

    def __post_init__(self):
        for d, b in enumerate(self.bins):
            if int(b) != b or b < 1:
                raise InvalidGrid(f"dimension {d}: bin count must be >= 1, got {b}")

    @property
    def n_regions(self) -> int:
        return int(np.prod(self.bins))

    def edges(self, space: DomainSpace, d: int) -> np.ndarray:
        dim = space.dims[d]
        return np.linspace(dim.min, dim.max, self.bins[d] + 1)

    def region(self, space: DomainSpace, index: tuple[int, ...]) -> Region:
        bounds = []
        for d, i in enumerate(index):
            if not 0 <= i < self.bins[d]:
                raise InvalidGrid(f"dimension {d}: index {i} outside [0, {self.bins[d] - 1}]")
            e = self.edges(space, d)
            bounds.append((float(e[i]), float(e[i + 1])))
        return Region(
            index=tuple(int(i) for i in index),
            bounds=tuple(bounds),
            is_first=tuple(i == 0 for i in index),
            is_last=tuple(i == self.bins[d] - 1 for d, i in enumerate(index)),
        )

    def iter_regions(self, space: DomainSpace) -> Iterator[Region]:
        """All regions in C order (last dimension fastest)."""
        for index in np.ndindex(*self.bins):
            yield self.region(space, index)

    def ravel(self, index: tuple[int, ...]) -> int:
        return int(np.ravel_multi_index(index, self.bins))


def validate_grid(grid: PartitionGrid, space: DomainSpace) -> None:
    """Check the grid partitions the space: rank match and >= 1 bin per dim.

    Disjointness and full coverage hold by construction of the equal-width
    edges, so there is nothing further to verify numerically.
    """
    if len(grid.bins) != space.ndim:
        raise InvalidGrid(
            f"grid has {len(grid.bins)} dimensions, domain has {space.ndim}"
        )
    # bin counts were validated at construction; re-check defensively
    for d, b in enumerate(grid.bins):
        if b < 1:
            raise InvalidGrid(f"dimension {d} ({space.dims[d].name}): bins must be >= 1")


def partition_indices(grid: PartitionGrid, space: DomainSpace,
                      xs: np.ndarray) -> np.ndarray:
    """Vectorized bin indices, shape (n, ndim), for in-domain points xs.

    Interior edges belong to the higher bin; the domain maximum belongs to
    the last bin.
    """
    validate_grid(grid, space)
    xs = np.asarray(xs, dtype=float)
    if xs.ndim == 1:
        xs = xs[None, :]
    out = np.empty(xs.shape, dtype=np.int64)
    for d, dim in enumerate(space.dims):
        col = xs[:, d]
        if np.any(col < dim.min) or np.any(col > dim.max):
            bad = col[(col < dim.min) | (col > dim.max)][0]
            raise OutOfDomain(f"{dim.name} = {bad} outside [{dim.min}, {dim.max}]")
        e = grid.edges(space, d)
        out[:, d] = np.minimum(np.searchsorted(e, col, side="right") - 1,
                               grid.bins[d] - 1)
    return out


def partition_index(grid: PartitionGrid, space: DomainSpace, x: Scenario) -> Region:
    """The unique region containing scenario x (OutOfDomain otherwise)."""
    idx = partition_indices(grid, space, np.array([x.values]))[0]
    return grid.region(space, tuple(int(i) for i in idx))


# ---------------------------------------------------------------------------
# Condition sets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConditionSet:
    """A named independent product distribution over a domain space."""

    name: str
    space: DomainSpace
    marginals: tuple[MarginalDistribution, ...]

    def __post_init__(self):
        if len(self.marginals) != self.space.ndim:
            raise ConfigError(
                f"condition {self.name!r}: {len(self.marginals)} marginals for "
                f"{self.space.ndim} dimensions"
            )
        for m, d in zip(self.marginals, self.space.dims):
            m.validate_for(d)

    def dim_masses(self, grid: PartitionGrid, d: int) -> np.ndarray:
        """Per-bin probability masses along dimension d (sums to 1)."""
        dim = self.space.dims[d]
        e = grid.edges(self.space, d)
        nb = grid.bins[d]
        m = self.marginals[d]
        return np.array([
            m.interval_mass(dim, float(e[i]), float(e[i + 1]),
                            first=(i == 0), last=(i == nb - 1))
            for i in range(nb)
        ])

    def region_mass_vector(self, grid: PartitionGrid) -> np.ndarray:
        """Masses of all regions, raveled in C order. Sums to 1 analytically."""
        validate_grid(grid, self.space)
        per_dim = [self.dim_masses(grid, d) for d in range(self.space.ndim)]
        out = per_dim[0]
        for v in per_dim[1:]:
            out = np.multiply.outer(out, v)
        return out.reshape(-1)


@dataclass(frozen=True)
class DiscreteCondition:
    """A finite explicit scenario -> probability table over the domain.

    Used for exact (brute-force) dependability on discrete-bounded domains;
    the table must cover the whole support and sum to 1.
    """

    name: str
    space: DomainSpace
    scenarios: tuple[Scenario, ...]
    probabilities: tuple[float, ...]

    def __post_init__(self):
        if len(self.scenarios) != len(self.probabilities):
            raise ConfigError(
                f"condition {self.name!r}: {len(self.scenarios)} scenarios, "
                f"{len(self.probabilities)} probabilities"
            )
        if not self.scenarios:
            raise ConfigError(f"condition {self.name!r}: empty table")
        for p in self.probabilities:
            if p < 0:
                raise ConfigError(f"condition {self.name!r}: negative probability {p}")
        total = math.fsum(self.probabilities)
        if abs(total - 1.0) > 1e-9:
            raise ConfigError(
                f"condition {self.name!r}: probabilities sum to {total!r}, not 1"
            )
        for s in self.scenarios:
            s.require_in(self.space)

    def region_mass_vector(self, grid: PartitionGrid) -> np.ndarray:
        """Sum of table probabilities per region, raveled in C order."""
        xs = np.array([s.values for s in self.scenarios])
        idx = partition_indices(grid, self.space, xs)
        keys = np.ravel_multi_index(idx.T, grid.bins)
        out = np.zeros(grid.n_regions)
        np.add.at(out, keys, np.asarray(self.probabilities))
        return out


Condition = Union[ConditionSet, DiscreteCondition]


def region_mass(cond: Condition, region: Region) -> float:
    """Probability mass of one region under a condition.

    For product conditions this is the product of per-dimension interval
    masses; clipped-Gaussian tails are absorbed by the first/last bins. For
    discrete tables it is the sum of member probabilities.
    """
    if isinstance(cond, DiscreteCondition):
        return float(math.fsum(
            p for s, p in zip(cond.scenarios, cond.probabilities)
            if region.contains(s.values)
        ))
    mass = 1.0
    for d, dim in enumerate(cond.space.dims):
        lo, hi = region.bounds[d]
        mass *= cond.marginals[d].interval_mass(
            dim, lo, hi, first=region.is_first[d], last=region.is_last[d]
        )
    return mass


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def substream(master_seed: int, index: int) -> np.random.Generator:
    """The generator for one unit of work under a master seed.

    Stream-splitting rule: substream i is PCG64 keyed by
    SeedSequence(master_seed, spawn_key=(i,)). Parallel workers drawing from
    their own substreams therefore reproduce sequential output exactly.
    """
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(master_seed, spawn_key=(index,)))
    )


def substream_seed(master_seed: int, index: int) -> int:
    """A 64-bit integer seed identifying substream ``index`` (for records)."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(index,))
    return int(ss.generate_state(1, np.uint64)[0])


def sample(cond: ConditionSet, n: int, seed: int) -> list[Scenario]:
    """Draw n scenarios from the condition's product distribution.

    Each scenario is drawn from its own substream (one per index), so the
    result is a pure function of (cond, n, seed) and is identical whether
    indices are generated sequentially or in parallel. Gaussian draws are
    clipped to the dimension bounds.
    """
    if n < 0:
        raise ConfigError(f"sample count must be >= 0, got {n}")
    if not isinstance(cond, ConditionSet):
        raise ConfigError("sample() draws from product conditions only")
    dims = cond.space.dims
    marginals = cond.marginals
    out = []
    for i in range(n):
        rng = substream(seed, i)
        out.append(Scenario(tuple(
            m.draw(rng, d) for m, d in zip(marginals, dims)
        )))
    return out
