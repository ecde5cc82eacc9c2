"""Block-terminated binary arithmetic coder over integer-weight models.

The coding path is exact integer arithmetic throughout, so output bytes are
identical on every platform.  Registers are REGISTER_BITS wide; interval
narrowing divides the range by the model total first, which keeps every
intermediate product inside 64 bits (this is what lets the compiled kernel
mirror this module word for word).

Framing contract: a block is any run of symbols followed by ``flush_block``.
The flush emits the pending underflow bits plus exactly two bits that pin a
quarter-width dyadic interval inside [low, high], so any continuation of the
stream decodes the block identically.  The decoder refills its register at
every block start and therefore reads REGISTER_BITS - 2 bits of lookahead
past the block; ``end_block`` rolls these back, making framing bit-exact.
"""

from __future__ import annotations

from bisect import bisect_right

from .bitio import BitCursor, BitString

__all__ = [
    "REGISTER_BITS",
    "MAX_TOTAL",
    "FrozenWeights",
    "ArithEncoder",
    "ArithDecoder",
    "CorruptStreamError",
    "ModelTotalError",
]

REGISTER_BITS = 62
_FULL = 1 << REGISTER_BITS
_HALF = _FULL >> 1
_QUARTER = _FULL >> 2
MAX_TOTAL = _QUARTER


class CorruptStreamError(Exception):
    """Decoder state inconsistent with the bit stream."""


class ModelTotalError(Exception):
    """Model total weight too large for the coder registers."""


class FrozenWeights:
    """Static integer-weight model over symbols 0..len(weights)-1.

    Reference model implementation used in tests; the adaptive model in
    ``ktmodel`` provides the same protocol (total / sym_range / find).
    """

    def __init__(self, weights):
        if not weights:
            raise ValueError("need at least one symbol")
        if any(w < 1 for w in weights):
            raise ValueError("all weights must be >= 1")
        self._cum = [0]
        for w in weights:
            self._cum.append(self._cum[-1] + w)
        self.alphabet_size = len(weights)
        self.total = self._cum[-1]

    def weight(self, j: int) -> int:
        return self._cum[j + 1] - self._cum[j]

    def sym_range(self, j: int) -> tuple[int, int]:
        if not 0 <= j < self.alphabet_size:
            raise ValueError(f"symbol {j} outside alphabet of size {self.alphabet_size}")
        return self._cum[j], self._cum[j + 1]

    def find(self, target: int) -> int:
        return bisect_right(self._cum, target) - 1


class ArithEncoder:
    """One encoder per output stream; ``flush_block`` resets it for reuse."""

    def __init__(self, out: BitString):
        self.out = out
        self.low = 0
        self.high = _FULL - 1
        self.pending = 0

    def _emit(self, bit: int) -> None:
        self.out.append(bit)
        opposite = bit ^ 1
        while self.pending:
            self.out.append(opposite)
            self.pending -= 1

    def encode_symbol(self, model, j: int) -> None:
        total = model.total
        if total > MAX_TOTAL:
            raise ModelTotalError(f"model total {total} exceeds {MAX_TOTAL}")
        cumlo, cumhi = model.sym_range(j)
        span = self.high - self.low + 1
        step = span // total
        if cumhi < total:
            self.high = self.low + step * cumhi - 1
        self.low += step * cumlo
        while True:
            if self.high < _HALF:
                self._emit(0)
            elif self.low >= _HALF:
                self._emit(1)
                self.low -= _HALF
                self.high -= _HALF
            elif self.low >= _QUARTER and self.high < 3 * _QUARTER:
                self.pending += 1
                self.low -= _QUARTER
                self.high -= _QUARTER
            else:
                break
            self.low <<= 1
            self.high = (self.high << 1) | 1

    def flush_block(self) -> None:
        # After renormalization low < HALF <= high, and either low < QUARTER
        # or high >= 3*QUARTER, so one of the two middle quarters always fits.
        if self.low < _QUARTER:
            self._emit(0)
            self.out.append(1)
        else:
            self._emit(1)
            self.out.append(0)
        self.low = 0
        self.high = _FULL - 1
        self.pending = 0


class ArithDecoder:
    """Decodes one block; construct a fresh instance per block."""

    def __init__(self, cursor: BitCursor):
        self.cursor = cursor
        self.low = 0
        self.high = _FULL - 1
        self.value = cursor.read_uint(REGISTER_BITS)

    def decode_symbol(self, model) -> int:
        total = model.total
        if total > MAX_TOTAL:
            raise ModelTotalError(f"model total {total} exceeds {MAX_TOTAL}")
        if not self.low <= self.value <= self.high:
            raise CorruptStreamError("code value escaped the current interval")
        span = self.high - self.low + 1
        step = span // total
        target = (self.value - self.low) // step
        if target >= total:
            target = total - 1
        j = model.find(target)
        cumlo, cumhi = model.sym_range(j)
        if cumhi < total:
            self.high = self.low + step * cumhi - 1
        self.low += step * cumlo
        while True:
            if self.high < _HALF:
                pass
            elif self.low >= _HALF:
                self.low -= _HALF
                self.high -= _HALF
                self.value -= _HALF
            elif self.low >= _QUARTER and self.high < 3 * _QUARTER:
                self.low -= _QUARTER
                self.high -= _QUARTER
                self.value -= _QUARTER
            else:
                break
            self.low <<= 1
            self.high = (self.high << 1) | 1
            self.value = (self.value << 1) | self.cursor.read_bit()
        return j

    def end_block(self) -> None:
        """Return the unconsumed lookahead; cursor lands just after the block."""
        self.cursor.rollback(REGISTER_BITS - 2)
