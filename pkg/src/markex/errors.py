"""Exception hierarchy shared by every module."""


class MarkexError(Exception):
    """Base class for all library errors."""


class InputError(MarkexError, ValueError):
    """Malformed or inconsistent user input (unknown labels, bad files, missing edges)."""


class ModelError(MarkexError, ValueError):
    """The model cannot produce a prediction (isolated vertex, sink, empty color class)."""


class ResourceError(MarkexError, RuntimeError):
    """An enumeration would exceed its configured budget."""


class NumericError(MarkexError, ArithmeticError):
    """A distribution could not be normalised."""
