"""Self-delimiting universal code for positive integers (Elias delta).

With ell(z) = floor(log2(max(z, 1))) + 1, a codeword for y spends
2*ell(ell(y)) + ell(y) - 2 bits: ell(ell(y)) - 1 zeros, then ell(y) in
binary, then the ell(y) - 1 low-order bits of y.
"""

from __future__ import annotations

from .bitio import BitCursor, BitString

__all__ = ["ell", "elias_encode", "elias_encode_into", "elias_decode", "EliasDecodeError"]

# ell(L) for any plausible length L fits well under this; longer zero runs
# mean a corrupt or truncated stream.
_MAX_PREFIX_ZEROS = 24


class EliasDecodeError(Exception):
    """Malformed or truncated codeword."""


def ell(z: int) -> int:
    """Length in bits of the binary encoding of z (ell(0) = ell(1) = 1)."""
    return max(z, 1).bit_length()


def elias_encode_into(out: BitString, y: int) -> None:
    if y < 1:
        raise ValueError(f"can only encode positive integers, got {y}")
    length = y.bit_length()
    zeros = length.bit_length() - 1
    for _ in range(zeros):
        out.append(0)
    out.append_uint(length, zeros + 1)
    out.append_uint(y & ((1 << (length - 1)) - 1), length - 1)


def elias_encode(y: int) -> BitString:
    out = BitString()
    elias_encode_into(out, y)
    return out


def elias_decode(cursor: BitCursor) -> int:
    zeros = 0
    while True:
        bit = cursor.read_bit()
        if bit:
            break
        zeros += 1
        if zeros > _MAX_PREFIX_ZEROS:
            raise EliasDecodeError("implausible codeword length prefix")
    length = (1 << zeros) | cursor.read_uint(zeros)
    return (1 << (length - 1)) | cursor.read_uint(length - 1)
