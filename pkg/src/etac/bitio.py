"""Bit-level streams with exact position accounting and rollback.

Bits are packed MSB-first within bytes; a final partial byte is padded with
zeros on serialization.  ``BitCursor`` keeps the furthest position ever
consumed (high-water) and supports rolling back reads, which the arithmetic
decoder uses to return lookahead bits at block boundaries.
"""

from __future__ import annotations

__all__ = ["BitString", "BitCursor", "TruncatedStreamError"]


class TruncatedStreamError(Exception):
    """Read past the end of a bit stream."""


class BitString:
    """Append-only bit sequence backed by a bytearray."""

    __slots__ = ("_buf", "_nbits")

    def __init__(self, bits=()):
        self._buf = bytearray()
        self._nbits = 0
        for b in bits:
            self.append(b)

    @classmethod
    def from_bytes(cls, data: bytes, nbits: int | None = None) -> "BitString":
        if nbits is None:
            nbits = 8 * len(data)
        if nbits > 8 * len(data) or nbits < 0:
            raise ValueError("nbits out of range for given data")
        s = cls()
        s._buf = bytearray(data)
        s._nbits = nbits
        return s

    def __len__(self) -> int:
        return self._nbits

    def __getitem__(self, pos: int) -> int:
        if not 0 <= pos < self._nbits:
            raise IndexError("bit index out of range")
        return (self._buf[pos >> 3] >> (7 - (pos & 7))) & 1

    def __iter__(self):
        return (self[i] for i in range(self._nbits))

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitString):
            return NotImplemented
        return self._nbits == other._nbits and self.to_bytes() == other.to_bytes()

    def __repr__(self) -> str:
        shown = "".join(str(b) for b in list(self)[:64])
        tail = "..." if self._nbits > 64 else ""
        return f"BitString({shown!r}{tail}, length={self._nbits})"

    def append(self, bit: int) -> None:
        if bit not in (0, 1):
            raise ValueError(f"bit must be 0 or 1, got {bit!r}")
        if self._nbits & 7 == 0:
            self._buf.append(0)
        if bit:
            self._buf[self._nbits >> 3] |= 1 << (7 - (self._nbits & 7))
        self._nbits += 1

    def extend(self, bits) -> None:
        for b in bits:
            self.append(b)

    def append_uint(self, value: int, width: int) -> None:
        """Append ``value`` as ``width`` bits, most significant first."""
        if width < 0 or value < 0 or value >> width:
            raise ValueError("value does not fit in width")
        for shift in range(width - 1, -1, -1):
            self.append((value >> shift) & 1)

    def to_bytes(self) -> bytes:
        return bytes(self._buf[: (self._nbits + 7) // 8])

    def to01(self) -> str:
        return "".join(str(b) for b in self)


def write_bit(stream: BitString, bit: int) -> BitString:
    stream.append(bit)
    return stream


class BitCursor:
    """Read position into a BitString, with rollback."""

    __slots__ = ("_bits", "position", "high_water")

    def __init__(self, bits: BitString, position: int = 0):
        if not 0 <= position <= len(bits):
            raise ValueError("initial position out of range")
        self._bits = bits
        self.position = position
        self.high_water = position

    def remaining(self) -> int:
        return len(self._bits) - self.position

    def read_bit(self) -> int:
        if self.position >= len(self._bits):
            raise TruncatedStreamError(
                f"read past end of stream (position {self.position})"
            )
        b = self._bits[self.position]
        self.position += 1
        if self.position > self.high_water:
            self.high_water = self.position
        return b

    def read_bits(self, k: int) -> BitString:
        if k < 0:
            raise ValueError("k must be non-negative")
        if self.position + k > len(self._bits):
            raise TruncatedStreamError(
                f"cannot read {k} bits at position {self.position} "
                f"of {len(self._bits)}"
            )
        out = BitString()
        for _ in range(k):
            out.append(self.read_bit())
        return out

    def read_uint(self, width: int) -> int:
        """Read ``width`` bits as an unsigned integer, MSB first."""
        value = 0
        for _ in range(width):
            value = (value << 1) | self.read_bit()
        return value

    def rollback(self, k: int) -> "BitCursor":
        if k < 0 or k > self.position:
            raise ValueError(f"cannot roll back {k} bits from position {self.position}")
        self.position -= k
        return self
