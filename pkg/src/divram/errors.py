"""Exception hierarchy shared by every module.

Callers that only care about "the inputs violated a stated bound" catch
:class:`PreconditionError`; the CLI maps it to exit code 4.
"""


class DivRamError(Exception):
    """Base class for all library errors."""


class ForbiddenOp(DivRamError):
    """A primitive outside the context's permitted instruction set was used."""

    def __init__(self, kind, enabled):
        self.kind = kind
        self.enabled = frozenset(enabled)
        super().__init__(
            f"primitive {kind!r} is not in the enabled instruction set "
            f"{{{', '.join(sorted(self.enabled))}}}"
        )


class PreconditionError(DivRamError, ValueError):
    """Inputs violate a documented precondition (message names the bound)."""


class ZeroDivisor(PreconditionError, ZeroDivisionError):
    pass


class NegativeOperand(PreconditionError):
    pass


class BothZero(PreconditionError):
    pass


class RadixTooSmall(PreconditionError):
    pass


class DigitOverflow(PreconditionError):
    pass


class SlotOverflow(PreconditionError):
    pass


class CoefficientOutOfRange(PreconditionError):
    pass


class DomainExceeded(PreconditionError):
    pass


class WitnessTooSmall(PreconditionError):
    pass


class WitnessInsufficient(PreconditionError):
    def __init__(self, message, step=None):
        self.step = step
        super().__init__(message)


class DimensionMismatch(PreconditionError):
    pass


class TooLarge(PreconditionError):
    pass


class NegativeEntry(PreconditionError):
    pass


class ZeroModulus(PreconditionError):
    pass


class NotCoprime(PreconditionError):
    def __init__(self, message, pair=None):
        self.pair = pair
        super().__init__(message)


class ScaleExceeded(PreconditionError):
    pass


class AttemptsExhausted(DivRamError):
    pass


class NoConvergence(PreconditionError):
    pass


class PrecisionInsufficient(PreconditionError):
    pass


class IndexOutOfRange(PreconditionError):
    pass


class ClassViolation(PreconditionError):
    pass
