"""Exception types shared across the package."""


class GmmLabError(Exception):
    """Base class for every error raised by gmm_lab."""


class InputError(GmmLabError, ValueError):
    """Malformed or out-of-domain input: bad shapes, non-finite entries,
    parameters outside their declared ranges."""


class DegenerateInputError(GmmLabError, ValueError):
    """Structurally valid input on which the requested statistic is
    undefined, e.g. a 0/0 similarity ratio."""


class RegimeError(GmmLabError, ValueError):
    """A formula was requested outside the parameter regime in which it
    holds (typically an infinite moment of the mixing variable)."""
