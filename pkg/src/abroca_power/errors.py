"""Exception hierarchy shared across the package.

The CLI maps ``DataError`` to exit code 2 and ``NumericalError`` to exit
code 3; everything else is a usage or programming error.
"""


class AbrocaError(Exception):
    """Base class for all errors raised by this package."""


class DataError(AbrocaError):
    """Invalid or unusable input data."""


class NumericalError(AbrocaError):
    """A numerical procedure failed to produce a usable result."""


class LengthMismatch(DataError):
    """Score, label, and group columns have unequal lengths."""


class EmptyGroup(DataError):
    """One of the two group values is absent from the data."""

    def __init__(self, group):
        self.group = int(group)
        super().__init__(f"group {self.group} has no instances")


class SingleClassGroup(DataError):
    """A group contains only one outcome label, so its ROC is undefined."""

    def __init__(self, group):
        self.group = int(group)
        super().__init__(f"group {self.group} contains a single outcome class")


class NonFiniteScore(DataError):
    """A score is NaN or infinite."""

    def __init__(self, row, detail=""):
        self.row = int(row)
        msg = f"non-finite score at row {self.row}"
        super().__init__(msg + (f" ({detail})" if detail else ""))


class NonBinaryColumn(DataError):
    """A label or group column holds values outside {0, 1}."""


class SingleClass(DataError):
    """All outcome labels are identical; the ROC curve is undefined."""


class DomainError(DataError):
    """A parameter lies outside its mathematical domain."""


class InfeasibleConfig(DataError):
    """A simulation configuration cannot produce a valid dataset."""


class DegenerateNull(NumericalError):
    """The permutation redraw budget was exhausted on degenerate draws."""


class NonPositiveSample(DataError):
    """A positive-support distribution was fitted to non-positive data."""


class NonConvergence(NumericalError):
    """A maximum-likelihood fit did not reach a stationary point."""


class ZeroVariance(DataError):
    """The samples have no variance, so the statistic is undefined."""


class CsvFormatError(DataError):
    """A CSV file does not conform to the expected layout."""

    def __init__(self, line, message):
        self.line = int(line)
        super().__init__(f"line {self.line}: {message}")
