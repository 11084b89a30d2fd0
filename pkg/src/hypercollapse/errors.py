"""Exception types raised across the package."""


class InvalidVertex(ValueError):
    """A vertex index is out of range, or repeated inside one edge."""


class PatchesPresent(ValueError):
    """An operation that needs a patch-free hypergraph received patches."""


class NotAGraph(ValueError):
    """An edge of cardinality other than two was found."""


class DomainError(ValueError):
    """An argument lies outside the domain of the function."""


class AssumptionViolated(RuntimeError):
    """A third root of s*rho'(x) + log(1-x) lies strictly inside a jump."""

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class ChainStopped(RuntimeError):
    """The collapse chain has no patches left and cannot step."""


class EmptySample(ValueError):
    """A statistical comparison received no samples."""


class ConfigError(ValueError):
    """An experiment configuration failed validation."""
