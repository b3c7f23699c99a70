class GmmPlotsError(Exception):
    """Base class for everything this package raises on purpose."""


class SchemaError(GmmPlotsError):
    """The input CSV is missing columns or rows the figure needs."""
