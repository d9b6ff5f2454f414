"""Exception hierarchy.

Three families map onto the CLI exit codes: input/format problems (2),
dimension or contract violations (3) and numerical-domain failures (4).
"""


class FaceStyleError(ValueError):
    """Base class for every error raised by this package."""

    exit_code = 1


class FormatError(FaceStyleError):
    exit_code = 2


class ContractError(FaceStyleError):
    exit_code = 3


class NumericalError(FaceStyleError):
    exit_code = 4


# file and schema problems
class BadMagic(FormatError):
    pass


class BadVersion(FormatError):
    pass


class TruncatedFile(FormatError):
    pass


class ZeroDims(FormatError):
    pass


class NonFinite(FormatError):
    pass


class MissingKey(FormatError):
    pass


class Unsorted(FormatError):
    pass


class Duplicate(FormatError):
    pass


# contract violations
class DimensionMismatch(ContractError):
    pass


class IndexOutOfRange(ContractError):
    pass


class EmptyRegion(ContractError):
    pass


class TooShort(ContractError):
    pass


class OrderTooLarge(ContractError):
    pass


class ConfigMismatch(ContractError):
    pass


class TooFewSamples(ContractError):
    pass


# numerical domain
class ZeroNorm(NumericalError):
    pass
