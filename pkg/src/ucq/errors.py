"""Exception types shared across the package."""


class UcqError(Exception):
    """Base class for all errors raised by this package."""


class SignatureError(UcqError, ValueError):
    """Two objects that must share a signature do not."""


class CapExceeded(UcqError):
    """A configured brute-force or enumeration cap was exceeded.

    Caps are never silently approximated; callers either raise the cap or
    fall back to a bounded routine explicitly.
    """

    def __init__(self, what, value, cap):
        self.what = what
        self.value = value
        self.cap = cap
        super().__init__(f"{what} = {value} exceeds cap {cap}")


class PreconditionError(UcqError, ValueError):
    """An operation was called on input outside its domain."""


class ParseError(UcqError, ValueError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        loc = ""
        if line is not None:
            loc = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(loc + message)
