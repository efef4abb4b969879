"""Exception hierarchy.

Data problems (bad files, broken references, undefined ratios) derive from
``DataError``; solver problems derive from ``NumericalError``. The CLI maps
the two families onto distinct exit codes.
"""


class HomeAdvError(Exception):
    pass


class DataError(HomeAdvError):
    pass


class NumericalError(HomeAdvError):
    pass


class ParticipantMismatchError(DataError, ValueError):
    """Focal team did not play in the match."""


class MissingGazetteerEntryError(DataError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class UndefinedRatioError(DataError, ZeroDivisionError):
    """A ratio metric has a zero denominator."""


class UndefinedQualityError(UndefinedRatioError):
    pass


class DegenerateRestError(DataError, ValueError):
    """Two matches for the same team on the same day."""


class InvalidStadiumError(DataError, ValueError):
    pass


class DegenerateLabelsError(NumericalError, ValueError):
    """All labels belong to one class; the MLE does not exist."""


class InsufficientDataError(NumericalError, ValueError):
    pass


class SingularSystemError(NumericalError):
    def __init__(self, columns, message=None):
        self.columns = list(columns)
        if message is None:
            message = "design matrix is rank deficient; offending columns: " + ", ".join(
                self.columns
            )
        super().__init__(message)


class InvalidInferenceError(NumericalError, ValueError):
    pass


class UsageError(HomeAdvError, ValueError):
    """Bad command-line or API usage (unknown format, missing argument)."""
