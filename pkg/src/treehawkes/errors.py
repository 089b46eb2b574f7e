"""Exception types shared across the package.

Every domain failure raises a subclass of TreeHawkesError so callers (and the
CLI) can separate usage bugs from data problems with one except clause.
"""


class TreeHawkesError(Exception):
    """Base class for all package-specific errors."""


class InvalidTree(TreeHawkesError):
    """Node arrays violate the tree contract (root, ordering, times)."""


class DegenerateTree(TreeHawkesError):
    """Tree too small for the statistic (e.g. no comments to average)."""


class InvalidOrder(TreeHawkesError):
    """Arrival order places a child before its parent."""


class InvalidParams(TreeHawkesError):
    """Model parameters outside their domain."""


class Supercritical(TreeHawkesError):
    """Branching number >= 1: expected size diverges."""


class InvalidWindow(TreeHawkesError):
    """Observation window inconsistent with the data (e.g. t_learn before
    an observed event, or a non-positive horizon)."""


class TooFewEvents(TreeHawkesError):
    """Not enough events for the requested statistic or fit."""


class TooSmall(TooFewEvents):
    """Tree below the minimum node count for a structural fit."""


class InsufficientData(TooFewEvents):
    """Observed tree cannot support a model fit (fallback ladder exhausted)."""


class EmptySample(TooFewEvents):
    """Empirical distribution requested on an empty sample."""


class EmptyProfile(TooFewEvents):
    """Depth-profile comparison on an empty profile."""


class NoFutureEvents(TreeHawkesError):
    """No events after t_learn, so a future likelihood is undefined."""


class OptimizerFailure(TreeHawkesError):
    """No multi-start optimization run produced a finite optimum."""


class SimulationBlowup(TreeHawkesError):
    """Simulated tree exceeded the hard node cap."""


class IngestError(TreeHawkesError):
    """Base class for ingest failures (only raised in strict mode)."""


class MissingRoot(IngestError):
    """Thread has no root event."""


class DuplicateId(IngestError):
    """Two events in one thread share an id."""


class OrphanEvent(IngestError):
    """Event references a parent id that does not exist."""


class NonMonotoneTime(IngestError):
    """Child timestamped strictly before its parent."""


class MalformedRecord(IngestError):
    """Record is not parseable as a canonical event."""


class IoFailure(TreeHawkesError):
    """Filesystem error while reading or writing an artifact."""


class VersionMismatch(TreeHawkesError):
    """Forest file written by an incompatible format version."""
