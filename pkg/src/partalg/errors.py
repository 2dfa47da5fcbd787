"""Exception types shared by every module."""


class PartalgError(Exception):
    """Base class. The CLI maps these to exit code 2."""

    code = "error"


class CapacityError(PartalgError):
    code = "capacity"


class ParityError(PartalgError):
    code = "parity"


class ShapeMismatchError(PartalgError):
    code = "shape_mismatch"


class DomainError(PartalgError, ValueError):
    code = "domain"


class ParseError(PartalgError, ValueError):
    code = "parse"

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} at byte {offset}"
        super().__init__(message)
        self.offset = offset


class InternalError(PartalgError):
    """A computed object broke an identity that must hold."""

    code = "internal"
