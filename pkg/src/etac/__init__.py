"""Adaptive auto-censoring compression for integer sequences.

The codec maintains an expanding data-driven threshold: frequent small
symbols go through an adaptive add-half mixture driven arithmetic coder,
rare large ones are escaped and sent as self-delimiting excess codewords.
"""

from .backend import USING_KERNEL
from .codec import (
    BadMagicError,
    CensorRule,
    CodelengthReport,
    CorruptPayloadError,
    DecodeError,
    TrailingGarbageError,
    UnknownFlagsError,
    codelength_report,
    decode,
    encode,
)

__version__ = "0.1.0"

__all__ = [
    "CensorRule",
    "CodelengthReport",
    "encode",
    "decode",
    "codelength_report",
    "DecodeError",
    "BadMagicError",
    "UnknownFlagsError",
    "CorruptPayloadError",
    "TrailingGarbageError",
    "USING_KERNEL",
    "__version__",
]
