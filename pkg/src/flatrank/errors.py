"""Exception types raised by flatrank."""


class FlatrankError(ValueError):
    """Base class for all domain errors."""


class NonSquareError(FlatrankError):
    pass


class SizeExceededError(FlatrankError):
    pass


class FieldTooSmallError(FlatrankError):
    pass


class IndexOutOfRangeError(FlatrankError):
    pass


class OrderExceedsDegreeError(FlatrankError):
    pass


class SplitMismatchError(FlatrankError):
    pass


class BadWedgeDegreeError(FlatrankError):
    pass


class VariablesNotDisjointError(FlatrankError):
    pass


class DegreeMismatchError(FlatrankError):
    pass


class NonSquareCatalecticantError(FlatrankError):
    pass


class FormFormatError(FlatrankError):
    """A form file does not follow the documented record layout."""
