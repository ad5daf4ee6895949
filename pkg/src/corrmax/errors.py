"""Exception hierarchy.

Every domain error derives from :class:`CorrmaxError`; the CLI maps those to
exit code 1 and anything argparse rejects to exit code 2.
"""


class CorrmaxError(ValueError):
    """Base class for data and domain errors."""


class InsufficientSamples(CorrmaxError):
    pass


class InsufficientColumns(CorrmaxError):
    pass


class InsufficientData(CorrmaxError):
    pass


class DegenerateColumn(CorrmaxError):
    def __init__(self, index, replication=None):
        self.index = index
        self.replication = replication
        msg = f"column {index} has zero centered variance"
        if replication is not None:
            msg += f" (replication {replication})"
        super().__init__(msg)


class InvalidP(CorrmaxError):
    pass


class InvalidStatistic(CorrmaxError):
    pass


class InvalidProbability(CorrmaxError):
    pass


class InfiniteVariance(CorrmaxError):
    pass


class NumericalFailure(CorrmaxError):
    def __init__(self, message, diagnostics=None):
        self.diagnostics = dict(diagnostics or {})
        if self.diagnostics:
            detail = ", ".join(f"{k}={v!r}" for k, v in self.diagnostics.items())
            message = f"{message} [{detail}]"
        super().__init__(message)


class InsufficientGrid(CorrmaxError):
    pass


class InvalidConfig(CorrmaxError):
    pass


class ShapeError(CorrmaxError):
    def __init__(self, line, message=None):
        self.line = line
        super().__init__(message or f"ragged row at line {line}")


class ParseError(CorrmaxError):
    def __init__(self, line, column, token=None):
        self.line = line
        self.column = column
        super().__init__(f"non-numeric cell {token!r} at line {line}, column {column}")
