"""Exception types shared by the codec front end and the compiled kernel."""

__all__ = [
    "DecodeError",
    "BadMagicError",
    "UnknownFlagsError",
    "CorruptPayloadError",
    "TrailingGarbageError",
    "KernelRangeError",
]


class DecodeError(Exception):
    """Base class for container decoding failures."""


class BadMagicError(DecodeError):
    pass


class UnknownFlagsError(DecodeError):
    pass


class CorruptPayloadError(DecodeError):
    pass


class TrailingGarbageError(DecodeError):
    pass


class KernelRangeError(Exception):
    """Symbol outside the compiled kernel's 62-bit integer range."""
