"""Exception hierarchy shared by all modules."""


class VertexAlgebraError(Exception):
    """Base class for library errors."""


class WindowViolation(VertexAlgebraError):
    """A degree or exponent fell outside the declared truncation window."""


class ModeCapError(VertexAlgebraError):
    """A mode index exceeded the configured cap K."""


class InvalidScalar(VertexAlgebraError):
    pass


class PoleError(VertexAlgebraError):
    pass


class RegionError(VertexAlgebraError):
    pass


class AliasingError(VertexAlgebraError):
    """Too few quadrature nodes for the requested Laurent coefficients."""


class DomainError(VertexAlgebraError):
    """An evaluation point lies outside the domain of the requested path."""


class DiagonalError(DomainError):
    """Two insertion points coincide."""


class LocalityUndetermined(VertexAlgebraError):
    """No order up to the cap could be verified (not an axiom violation)."""


class StructuralInconsistency(VertexAlgebraError):
    pass


class AxiomViolation(VertexAlgebraError):
    pass


class ConfigError(VertexAlgebraError):
    pass
