"""Error taxonomy.

Every error carries the process exit code the CLI uses for it:
2 for invalid input or configuration, 3 for numerical failure.
"""


class BvpError(Exception):
    exit_code = 3


class ValidationError(BvpError, ValueError):
    """Input document or configuration is invalid."""

    exit_code = 2


class ProblemSyntaxError(ValidationError):
    """Malformed problem document; the message starts with the schema path."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


class DimensionMismatch(ValidationError):
    pass


class InvalidOrder(ValidationError):
    pass


class InvalidSpace(ValidationError):
    pass


class EmptyInterval(ValidationError):
    pass


class ToleranceConflict(ValidationError):
    pass


class OutOfDomain(ValidationError):
    pass


class NumericalError(BvpError):
    exit_code = 3


class SingularFundamental(NumericalError):
    pass


class NonFiniteValue(NumericalError):
    pass


class UnsupportedOrder(NumericalError):
    pass


class IntegerOrder(NumericalError):
    pass


class MissingDerivatives(NumericalError):
    pass


class NoSolution(NumericalError):
    pass


class NoApplicableOracle(ValidationError):
    pass


#: exit code for every error class; the CLI uses ``exc.exit_code``
EXIT_CODES = {
    cls.__name__: cls.exit_code
    for cls in (
        ProblemSyntaxError,
        DimensionMismatch,
        InvalidOrder,
        InvalidSpace,
        EmptyInterval,
        ToleranceConflict,
        OutOfDomain,
        NoApplicableOracle,
        SingularFundamental,
        NonFiniteValue,
        UnsupportedOrder,
        IntegerOrder,
        MissingDerivatives,
        NoSolution,
    )
}
