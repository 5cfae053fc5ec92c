"""Exception hierarchy shared by all modules."""


class VSumsError(Exception):
    """Base class for every library error."""


class IncompatibleOrderError(VSumsError, ValueError):
    pass


class SingularValueError(VSumsError, ZeroDivisionError):
    pass


class InvalidContextError(VSumsError, ValueError):
    pass


class ImproperConvolutionError(VSumsError, ValueError):
    pass


class ImproperPushforwardError(VSumsError, ValueError):
    pass


class NotPeriodicError(VSumsError, ValueError):
    pass


class NotInvertibleError(VSumsError, ArithmeticError):
    pass


class PrecisionError(VSumsError, ArithmeticError):
    """A truncated series was read beyond its valid order."""


class NonGenericGammaError(VSumsError, ValueError):
    pass


class NonGenericChamberPointError(VSumsError, ValueError):
    pass


class NotFullRankError(VSumsError, ValueError):
    pass


class NotPolarizingError(VSumsError, ValueError):
    pass


class EmptyListError(VSumsError, ValueError):
    pass


class SizeLimitError(VSumsError, RuntimeError):
    """Refusing a brute-force evaluation that would be too large."""


class OutsideValidityError(VSumsError, ValueError):
    pass


class WallPointError(VSumsError, ValueError):
    pass
