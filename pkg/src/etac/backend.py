"""Selects the compiled kernel when available, pure Python otherwise.

Both paths produce byte-identical payloads (the kernel mirrors the pure
integer arithmetic exactly; the test suite pins this).  Set ETAC_FORCE_PURE=1
to skip the kernel.  Messages whose symbols exceed the kernel's 62-bit range
transparently fall back to the pure path.
"""

from __future__ import annotations

import os

__all__ = ["USING_KERNEL", "encode_payload", "decode_payload"]

_KERNEL_SYMBOL_LIMIT = 1 << 62

if os.environ.get("ETAC_FORCE_PURE", "") not in ("", "0"):
    _kernel = None
else:
    try:
        from . import _kernel  # type: ignore[attr-defined]
    except ImportError:
        _kernel = None

USING_KERNEL = _kernel is not None


def _kernel_can_encode(symbols) -> bool:
    try:
        import numpy as np

        if isinstance(symbols, np.ndarray):
            return symbols.size == 0 or int(symbols.max()) < _KERNEL_SYMBOL_LIMIT
    except ImportError:  # pragma: no cover
        pass
    return all(x < _KERNEL_SYMBOL_LIMIT for x in symbols)


def encode_payload(symbols, value_mode: bool):
    """Returns (payload bytes, payload bit length, stats tuple)."""
    if _kernel is not None and _kernel_can_encode(symbols):
        return _kernel.encode_message(symbols, value_mode)
    from .codec import encode_payload_pure

    return encode_payload_pure(symbols, value_mode)


def decode_payload(payload: bytes, value_mode: bool):
    if _kernel is not None:
        from .errors import KernelRangeError

        try:
            return _kernel.decode_message(payload, value_mode)
        except KernelRangeError:
            pass  # symbol beyond the kernel's integer range; retry pure
    from .codec import decode_payload_pure

    return decode_payload_pure(payload, value_mode)
