"""Exception hierarchy shared across the package."""


class TableFoldError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(TableFoldError):
    """Invalid CSV structure, descriptor, or column declaration."""


class MappingError(TableFoldError):
    """Invalid visual mapping specification or out-of-domain input."""


class FilterError(TableFoldError):
    """Invalid filter specification (bad regex, bad range, unknown column)."""


class StateError(TableFoldError):
    """Invalid table-state mutation (unknown column/group, bad criterion)."""


class StatsError(TableFoldError):
    """Statistic requested over an empty (all-missing) sample."""


class ScriptError(TableFoldError):
    """Expression parse or validation failure; carries a source offset."""

    def __init__(self, message, offset=None):
        super().__init__(message)
        self.offset = offset


class SceneError(TableFoldError):
    """Illegal encoding override or window outside layout bounds."""


class ProtocolError(TableFoldError):
    """Malformed command or snapshot document."""
