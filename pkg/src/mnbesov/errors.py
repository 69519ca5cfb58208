"""Exception hierarchy shared by all modules."""


class MNBesovError(Exception):
    """Base class for library errors."""


class InvalidFieldError(MNBesovError, ValueError):
    """Non-finite samples or malformed field data."""


class AsymmetryError(MNBesovError, ValueError):
    """Spectral coefficients are not conjugate symmetric."""


class ShapeError(MNBesovError, ValueError):
    """Component count or grid mismatch."""


class InvalidExponentError(MNBesovError, ValueError):
    """A Lebesgue exponent lies outside [1, inf]."""


class IncompatibleExponentsError(MNBesovError, ValueError):
    pass


class PreconditionError(MNBesovError, ValueError):
    """Index or exponent relations required by an estimate do not hold."""


class BandError(MNBesovError, ValueError):
    """Dyadic index outside the resolved band, or band too small."""


class BandOverflowError(BandError):
    """A product's spectrum escapes the alias-free band."""


class SupportError(MNBesovError, ValueError):
    """Spectrum escapes the declared ball, annulus or box."""


class CriticalityError(MNBesovError, ValueError):
    pass


class DomainError(MNBesovError, ValueError):
    pass


class TimeGridError(MNBesovError, ValueError):
    pass


class EmptyTrajectoryError(MNBesovError, ValueError):
    pass


class ConsistencyError(MNBesovError, ValueError):
    """Input violates the incompressibility constraint."""


class CorpusError(MNBesovError, ValueError):
    pass


class DivergenceError(MNBesovError, RuntimeError):
    """Picard residual grew for several consecutive iterations."""


class BoundViolation(MNBesovError, AssertionError):
    """A proven bound failed on a run whose hypotheses held."""


class StepSizeError(MNBesovError, ValueError):
    pass


class ConfigError(MNBesovError, ValueError):
    pass
