class InputError(Exception):
    exit_code = 64


class InternalError(Exception):
    exit_code = 70


class PolynomialSyntaxError(InputError):
    def __init__(self, message: str, position: int = -1):
        if position >= 0:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class VariableIndexError(PolynomialSyntaxError):
    pass


class MapFileError(InputError):
    pass


class UnboundParameterError(InputError):
    exit_code = 65


class DimensionMismatchError(InputError):
    pass


class SingularMatrixError(InputError):
    pass


class SweepRangeError(InputError):
    pass


class UnknownStrategyError(InputError):
    pass


class UsageError(InputError):
    pass


class MissingWeightError(InputError):
    pass


class NonPositiveCoefficientError(InternalError):
    pass


class PreconditionError(InternalError):
    pass


class InternalConsistencyError(InternalError):
    pass

