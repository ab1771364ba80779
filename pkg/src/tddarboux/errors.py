"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A run configuration failed validation."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class CausticError(RuntimeError):
    """A required real time factor vanishes inside the requested window.

    The closed-form families divide by gamma- or delta-type factors; once
    such a factor crosses zero the potential turns singular and evaluation
    is refused rather than continued.
    """


class NodeError(RuntimeError):
    """A transformation function vanishes at the evaluation point."""


class CoincidentFunctionError(RuntimeError):
    """Second-order chain received two dependent transformation functions."""


class XDependenceError(RuntimeError):
    """Im(log u)_xx failed the x-independence probe.

    The time factor of a first-order transform only exists when the mixed
    phase curvature is a pure function of time; x-dependence signals an
    invalid transformation function.
    """


class NormalizationError(ValueError):
    """Envelope Wronskian is incompatible with the requested family."""


class IntegrationError(RuntimeError):
    """The envelope integrator failed to reach the requested time."""


class BoundaryLeakError(RuntimeError):
    """A propagated wavepacket reached the grid boundary."""
