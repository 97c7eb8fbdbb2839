"""Error types shared across the package."""


class RangeError(IndexError):
    """An index or frequency lies outside ``[0, N)``."""


class ContractError(ValueError):
    """A caller supplied inputs violating a documented precondition."""


class ParameterError(ValueError):
    """A parameter combination is invalid or would make a routine diverge."""


class FormatError(ValueError):
    """A serialized signal file is malformed."""
