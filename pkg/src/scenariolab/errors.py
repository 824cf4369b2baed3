"""Exception hierarchy shared by all scenariolab modules."""


class ScenarioLabError(Exception):
    """Base class for all errors raised by scenariolab."""


class ParseError(ScenarioLabError):
    """A data or scenario file could not be parsed."""


class DateFormatError(ParseError):
    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class DuplicateDateError(ParseError):
    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class CellParseError(ParseError):
    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class NoOverlapError(ScenarioLabError):
    """Selected datasets share no usable dates."""


class UnresolvedRefError(ScenarioLabError):
    """A scenario references a source or attribute that does not exist."""


class DuplicateScenarioError(ParseError):
    """Two scenarios in one suite carry the same scenario_id."""


class InsufficientNeighborsError(ScenarioLabError):
    """Preset generation needs at least three collaborative sources."""


class SeriesTooShortError(ScenarioLabError):
    def __init__(self, message, needed=None, have=None):
        super().__init__(message)
        self.needed = needed
        self.have = have


class SplitError(ScenarioLabError):
    """A train/test split would leave one side empty."""


class ConfigError(ScenarioLabError):
    """Invalid learner or run configuration."""


class NonFiniteDataError(ScenarioLabError):
    """Training or prediction data contains NaN or infinity."""


class FeatureShapeError(ScenarioLabError):
    """Prediction input width differs from the training feature count."""


class ShapeError(ScenarioLabError):
    """Two vectors that must align have different lengths."""


class AllExcludedError(ScenarioLabError):
    """Every term of the relative error was excluded by the zero guard."""


class UndefinedCorrelationError(ScenarioLabError):
    """Correlation is undefined because one side has zero variance."""


class MeasureError(ScenarioLabError):
    """Unknown performance measure name."""


class CellNotFoundError(ScenarioLabError):
    """No (scenario, location, algorithm) cell with the given identifiers."""


class SuiteFailedError(ScenarioLabError):
    """Every cell of a suite run failed."""
