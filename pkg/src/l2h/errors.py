"""Exception hierarchy shared by all l2h modules."""


class L2HError(Exception):
    """Base class for every error raised by this package."""


class PresentationSyntaxError(L2HError):
    def __init__(self, message, position=None, line=None, column=None):
        self.position = position
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}, column {column})"
        super().__init__(message + where)


class UnknownGenerator(L2HError):
    pass


class DuplicateGenerator(L2HError):
    pass


class UnsupportedGroup(L2HError):
    """No decidable word arithmetic could be set up for a presentation."""


class NonConfluentRewriting(L2HError):
    pass


class InvalidGroupTable(L2HError):
    pass


class BallTooLarge(L2HError):
    pass


class SupportCapExceeded(L2HError):
    pass


class DimensionMismatch(L2HError):
    pass


class RelatorNotTrivialInGroup(L2HError):
    pass


class DegreeOutOfRange(L2HError):
    pass


class NotACycle(L2HError):
    pass


class ProfileNotApplicable(L2HError):
    pass


class RelatorViolation(L2HError):
    """A quotient's generator images do not satisfy some relator."""


class UnsupportedGroupForResolution(L2HError):
    pass


class HypothesisNotSatisfied(L2HError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NoCandidateSubset(L2HError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics
