"""Exception hierarchy shared by all modules."""


class KModuleError(Exception):
    """Base class for every error raised by kfredholm."""


class InvalidInput(KModuleError, ValueError):
    """Input is not a finite, non-empty complex matrix (or similar)."""


class DimensionMismatch(KModuleError, ValueError):
    pass


class NotHermitian(KModuleError, ValueError):
    pass


class DomainError(KModuleError, ValueError):
    """A scalar function was asked to act outside its domain."""


class NotMinimalProjection(KModuleError, ValueError):
    pass


class DefectSingular(KModuleError, ArithmeticError):
    """1 - F*F is numerically singular, so no operator at this level has F as transform."""


class NoPseudoInverse(KModuleError, ArithmeticError):
    pass


class NotFredholm(KModuleError, ArithmeticError):
    pass


class IndexNonzero(KModuleError, ArithmeticError):
    pass


class SchemaError(KModuleError, ValueError):
    """Scenario or generator JSON failed validation.

    ``field`` is the dotted path of the offending entry.
    """

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message
