"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command line: 2 for bad
input data, 3 for numerical failures.
"""


class CorrBreakError(Exception):
    exit_code = 3


class DataError(CorrBreakError):
    exit_code = 2


class NumericError(CorrBreakError):
    exit_code = 3


class NonPositiveVariance(NumericError):
    pass


class UnknownModel(DataError):
    pass


class BandwidthTooSmall(NumericError):
    pass


class EmptyGrid(DataError):
    pass


class AllInfeasible(NumericError):
    pass


class SideTooShort(NumericError):
    pass


class IndexOutOfRange(DataError):
    pass


class SeriesTooShort(DataError):
    pass


class WindowTooLarge(DataError):
    pass


class InsufficientLength(DataError):
    pass


class DegenerateBreak(NumericError):
    pass


class GridTooSmall(DataError):
    pass


class SegmentTooShort(DataError):
    pass


class EmptySeries(DataError):
    pass


class UnknownExperiment(DataError):
    pass


class ParseError(DataError):
    def __init__(self, line, message="could not parse value"):
        self.line = line
        super().__init__(f"line {line}: {message}")
