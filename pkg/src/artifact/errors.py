"""Exception hierarchy shared by every module."""


class ArtifactError(Exception):
    """Base class for all library errors."""


class SpecMismatch(ArtifactError):
    pass


class NotAUnit(ArtifactError):
    pass


class ZeroElement(ArtifactError):
    pass


class DegreeMismatch(ArtifactError):
    pass


class PrecisionExhausted(ArtifactError):
    """An operation would need more p-adic digits than are available."""


class UnknownGroup(ArtifactError):
    pass


class InvalidLevi(ArtifactError):
    pass


class NotInDomain(ArtifactError):
    pass


class NotInIwahori(ArtifactError):
    pass


class NotInType(ArtifactError):
    pass


class NonClosedSubsystem(ArtifactError):
    """A conductor threshold set is not a closed root subsystem."""


class NotInvariant(ArtifactError):
    pass


class WrongBlock(ArtifactError):
    pass


class WindowTooSmall(ArtifactError):
    """A brute-force value changed when the enumeration window grew."""


class NotSemisimpleNorm(ArtifactError):
    pass


class UnsupportedClass(ArtifactError):
    pass


class ConfigError(ArtifactError):
    pass
