"""Error types shared across the package."""


class DimensionError(ValueError):
    """Operand dimensions do not conform."""


class ConfigurationError(ValueError):
    """A configuration value or file is invalid."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class TableLookupError(KeyError):
    """A requested key is not present in a lookup table."""
