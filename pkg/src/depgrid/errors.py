"""Exception hierarchy. Each class carries the CLI exit code it maps to."""

from __future__ import annotations


class DepgridError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 1


class ConfigError(DepgridError):
    """Malformed or inconsistent configuration (documents, grids, flags)."""

    exit_code = 2


class DataError(DepgridError):
    """Malformed or inconsistent data (scenario files, records, campaigns)."""

    exit_code = 3


class OutOfDomain(DataError):
    """A scenario coordinate lies outside its dimension bounds."""


class InvalidGrid(ConfigError):
    """A partition grid is unusable for the given domain space."""


class EmptyCampaign(DataError):
    """An operation that needs test records received none."""


class IncompleteOutcomes(DataError):
    """A brute-force condition table contains scenarios without outcomes."""


class SteppingTerminatedEpisode(DepgridError):
    """step() was called on a collided or time-expired episode state."""


class EpisodeNotFinished(DepgridError):
    """classify() was called before the episode ended."""


class EmptyPartition(DepgridError):
    """Regions with positive target mass received no test samples.

    The offending regions are kept on the exception so callers (and the CLI)
    can list exactly which parts of the domain are uncovered.
    """

    exit_code = 4

    def __init__(self, regions):
        self.regions = tuple(regions)
        indices = ", ".join(str(r.index) for r in self.regions[:8])
        more = "" if len(self.regions) <= 8 else f" (+{len(self.regions) - 8} more)"
        super().__init__(
            f"{len(self.regions)} region(s) with positive target mass have no "
            f"test samples: {indices}{more}"
        )
