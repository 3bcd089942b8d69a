"""Exception types raised across rankselect."""


class RankSelectError(ValueError):
    """Base class for all rankselect input/contract errors."""


# data_io
class MissingTarget(RankSelectError):
    pass


class EmptyAfterFilter(RankSelectError):
    pass


class ParseError(RankSelectError):
    """A cell could not be parsed.

    ``row`` is the 1-based line number in the file (header is line 1) and
    ``column`` the header name of the offending cell.
    """

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class NoDates(RankSelectError):
    pass


class InvalidSpec(RankSelectError):
    pass


# correlation / evaluation
class LengthMismatch(RankSelectError):
    pass


class ZeroVariance(RankSelectError):
    pass


class Empty(RankSelectError):
    pass


# ranking
class ItemSetMismatch(RankSelectError):
    pass


# models
class TooFewRows(RankSelectError):
    pass


class FeatureMismatch(RankSelectError):
    pass


class UnknownFeature(RankSelectError):
    pass
