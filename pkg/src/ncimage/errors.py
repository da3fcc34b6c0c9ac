"""Exception hierarchy shared by every ncimage module."""


class NcImageError(Exception):
    """Base class for all errors raised by ncimage."""


class InvalidInputError(NcImageError, ValueError):
    pass


class FieldMismatchError(NcImageError, TypeError):
    """Operands live over different coefficient fields."""


class NotLinearError(InvalidInputError):
    """A term does not contain the distinguished variable exactly once."""


class DimensionMismatchError(InvalidInputError):
    pass


class PreconditionError(InvalidInputError):
    """An operation was called outside its documented domain."""


class SynthesisFailure(NcImageError):
    """No polynomial exists in the requested ansatz space.

    ``rank`` and ``unknowns`` describe the linear system that was found
    inconsistent; ``residual_rank`` is the rank of the augmented system.
    """

    def __init__(self, msg, *, rank=None, residual_rank=None, unknowns=None):
        super().__init__(msg)
        self.rank = rank
        self.residual_rank = residual_rank
        self.unknowns = unknowns


class WitnessNotFound(NcImageError):
    pass


class UnsupportedDimension(NcImageError):
    pass


class TheoryViolation(NcImageError, AssertionError):
    """A result contradicts a theorem the implementation relies on.

    This never fires on valid inputs; when it does, there is a bug.
    """


class ParseError(InvalidInputError):
    def __init__(self, msg, line=1, column=1):
        super().__init__(f"{msg} (line {line}, column {column})")
        self.line = line
        self.column = column
