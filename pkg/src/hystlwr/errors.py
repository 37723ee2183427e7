"""Exception types shared across the package."""


class DomainError(ValueError):
    """A state lies outside the admissible (u, h) domain."""


class DegenerateJumpError(ValueError):
    """Jump too small to carry a shock (|u_+ - u_-| below tolerance)."""


class InadmissibleWaveError(ValueError):
    """Requested wave kind violates one of its preconditions."""


class OutOfFanError(ValueError):
    """Self-similar coordinate xi falls outside a rarefaction fan."""


class NoSolutionError(ValueError):
    """The Riemann problem has no admissible fan for the given data."""


class NoRootError(ValueError):
    """A tangency construction has no root; caller should fall through."""


class InvalidOverbrakeError(ValueError):
    """Over-braking target speed is not below the downstream speed, or its chords fail."""


class UnknownScenarioError(KeyError):
    """Scenario name not in the registry."""
