"""Exception types shared across the package.

Every failure mode that callers are expected to handle gets its own class so
test code can assert on the exact condition instead of matching messages.
"""


class WittSymError(Exception):
    """Base class for all package errors."""


class NotPrime(WittSymError):
    pass


class NotIrreducible(WittSymError):
    pass


class NotASubfield(WittSymError):
    pass


class FieldMismatch(WittSymError):
    pass


class ZeroInput(WittSymError):
    pass


class ZeroEntry(WittSymError):
    pass


class PoleAtPlace(WittSymError):
    pass


class LengthTooLarge(WittSymError):
    pass


class LengthMismatch(WittSymError):
    pass


class TooLarge(WittSymError):
    pass


class SupportExceedsBound(WittSymError):
    pass


class BoundTooSmall(WittSymError):
    pass


class WildAtPlace(WittSymError):
    pass


class InsufficientPrecision(WittSymError):
    pass


class NotConstantExtension(WittSymError):
    pass


class NoPreimage(WittSymError):
    pass


class UnsupportedDegree(WittSymError):
    pass


class ParseError(WittSymError):
    pass


class ConfigError(WittSymError):
    pass
