"""Exception hierarchy shared by all modules."""


class HadamardError(Exception):
    """Base class for library errors."""


class ChartError(HadamardError, ValueError):
    """Coordinates do not describe a valid point or (co)tangent vector."""


class BaseMismatchError(HadamardError, ValueError):
    """Vectors attached to different base points were combined."""


class ManifoldMismatchError(HadamardError, ValueError):
    """Objects living on different manifolds were combined."""


class DomainError(HadamardError, ValueError):
    """An argument lies outside the domain of an operation."""


class HypothesisError(HadamardError, ValueError):
    """A function does not carry the flags an operation requires."""


class PreconditionError(HadamardError, ValueError):
    pass


class SeparationImpossibleError(HadamardError):
    """The two sets intersect, so no strict separation exists."""


class ConfigError(HadamardError, ValueError):
    pass
