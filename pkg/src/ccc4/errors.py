"""Exception types shared across the package."""


class CCC4Error(Exception):
    """Base class for all package-specific errors."""


class DegeneratePointError(CCC4Error):
    """A chart point sits on the boundary where the potential blows up."""


class RegionViolationError(CCC4Error):
    """A sphere-product point does not map back to nonnegative coordinates."""


class NonRealizableError(CCC4Error):
    """A distance vector does not correspond to an actual point configuration."""


class IndeterminateShapeError(CCC4Error):
    """A denominator in the multiplier or mass recovery vanishes."""


class InfeasibleShapeError(CCC4Error):
    """No positive masses make the given shape a central configuration."""

    def __init__(self, reason, value=None):
        super().__init__(reason if value is None else f"{reason} ({value:.6g})")
        self.reason = reason
        self.value = value


class UniquenessAlarmError(CCC4Error):
    """Multistart endpoints split into several clusters.

    Distinct converged endpoints for one mass vector contradict the
    uniqueness of the constrained minimizer and indicate a solver bug.
    """
