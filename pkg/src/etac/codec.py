"""Auto-censoring codec over positive integers.

Encoding walks the message once.  At each position the current threshold T
(the queue size under the rank rule, the queue minimum under the value rule)
fixes the mixture alphabet {0..T}: symbols <= T are arithmetic-coded under
the add-half weights, larger ones are escaped (symbol 0), the arithmetic
block is flushed, and the excess x - T + 1 >= 2 follows as a self-delimiting
integer codeword.  A terminating escape with excess 1 ends the message, so
the container needs no stored length.  Counts and threshold are updated
after every data symbol, identically on both sides.

Container layout: magic ``ETC1``, one flags byte (bit 0: censor rule,
0 = rank, 1 = value; other bits reserved, must be zero), then the payload
bits packed MSB-first and zero-padded to a byte boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import log2

from . import backend
from .arith import REGISTER_BITS, ArithDecoder, ArithEncoder, CorruptStreamError, ModelTotalError
from .bitio import BitCursor, BitString, TruncatedStreamError
from .elias import EliasDecodeError, elias_decode, elias_encode_into
from .errors import (
    BadMagicError,
    CorruptPayloadError,
    DecodeError,
    TrailingGarbageError,
    UnknownFlagsError,
)
from .ktmodel import CountTable
from .threshold import ThresholdState

__all__ = [
    "CensorRule",
    "CodelengthReport",
    "DecodeError",
    "BadMagicError",
    "UnknownFlagsError",
    "CorruptPayloadError",
    "TrailingGarbageError",
    "MAGIC",
    "encode",
    "decode",
    "codelength_report",
    "encode_payload_pure",
    "decode_payload_pure",
    "trace",
]

MAGIC = b"ETC1"


class CensorRule(Enum):
    RANK = "rank"
    VALUE = "value"


@dataclass(frozen=True)
class CodelengthReport:
    total_bits: int
    mixture_bits: int
    elias_bits: int
    n_censored: int
    threshold_m: int
    ideal_mixture_bits: float
    distinct: int

    def __post_init__(self):
        assert self.total_bits == self.mixture_bits + self.elias_bits


def _threshold(thr: ThresholdState, value_mode: bool) -> int:
    return thr.tau if value_mode else thr.m


def encode_payload_pure(symbols, value_mode: bool):
    """Reference encoder.  Returns (payload bytes, payload bit length, stats).

    stats = (mixture_bits, elias_bits, ideal_mixture_bits, n_censored,
    threshold_m, distinct).
    """
    bits = BitString()
    enc = ArithEncoder(bits)
    counts = CountTable()
    thr = ThresholdState()
    ideal = 0.0
    elias_bits = 0
    n_censored = 0

    n = len(symbols)
    for i in range(n + 1):
        terminator = i == n
        top = _threshold(thr, value_mode)
        view = counts.weights_view(top)
        if terminator:
            censored = True
        else:
            x = symbols[i]
            if x < 1:
                raise ValueError(f"symbols must be positive integers, got {x!r}")
            censored = x > top
        if censored:
            enc.encode_symbol(view, 0)
            ideal += log2(view.total)
            enc.flush_block()
            excess = 1 if terminator else x - top + 1
            before = len(bits)
            elias_encode_into(bits, excess)
            elias_bits += len(bits) - before
            if not terminator:
                n_censored += 1
        else:
            enc.encode_symbol(view, x)
            ideal += log2(view.total) - log2(view.weight(x))
        if not terminator:
            counts.record(x)
            thr.observe(x)

    mixture_bits = len(bits) - elias_bits
    stats = (mixture_bits, elias_bits, ideal, n_censored, thr.m, counts.distinct)
    return bits.to_bytes(), len(bits), stats


def decode_payload_pure(payload: bytes, value_mode: bool) -> list[int]:
    """Reference decoder; inverse of ``encode_payload_pure``."""
    true_bits = 8 * len(payload)
    bits = BitString.from_bytes(payload)
    for _ in range(REGISTER_BITS):
        bits.append(0)  # lookahead past the final block reads zeros
    cursor = BitCursor(bits)
    counts = CountTable()
    thr = ThresholdState()
    out: list[int] = []

    try:
        while True:
            top = _threshold(thr, value_mode)
            dec = ArithDecoder(cursor)
            while True:
                view = counts.weights_view(top)
                sym = dec.decode_symbol(view)
                if sym == 0:
                    break
                out.append(sym)
                counts.record(sym)
                thr.observe(sym)
                top = _threshold(thr, value_mode)
            dec.end_block()
            if cursor.position > true_bits:
                raise CorruptPayloadError("payload ends inside an arithmetic block")
            excess = elias_decode(cursor)
            if cursor.position > true_bits:
                raise CorruptPayloadError("payload ends inside an excess codeword")
            if excess == 1:
                break
            x = excess + top - 1
            out.append(x)
            counts.record(x)
            thr.observe(x)
    except TruncatedStreamError as exc:
        raise CorruptPayloadError(f"truncated payload: {exc}") from exc
    except (EliasDecodeError, CorruptStreamError, ModelTotalError) as exc:
        raise CorruptPayloadError(str(exc)) from exc

    for pos in range(cursor.position, true_bits):
        if bits[pos]:
            raise TrailingGarbageError("nonzero bits after the terminator")
    if true_bits - cursor.position >= 8:
        raise TrailingGarbageError("extra bytes after the terminator")
    return out


def encode(symbols, rule: CensorRule = CensorRule.RANK) -> bytes:
    """Encode a message into a self-contained container."""
    value_mode = rule is CensorRule.VALUE
    payload, _, _ = backend.encode_payload(symbols, value_mode)
    flags = 1 if value_mode else 0
    return MAGIC + bytes([flags]) + payload


def decode(container: bytes) -> list[int]:
    """Decode a container; the flags byte selects the censor rule."""
    if len(container) < 5:
        raise BadMagicError("container shorter than its header")
    if container[:4] != MAGIC:
        raise BadMagicError(f"bad magic {container[:4]!r}")
    flags = container[4]
    if flags & ~1:
        raise UnknownFlagsError(f"unknown flag bits 0x{flags:02x}")
    return backend.decode_payload(container[5:], bool(flags & 1))


def codelength_report(symbols, rule: CensorRule = CensorRule.RANK) -> CodelengthReport:
    value_mode = rule is CensorRule.VALUE
    _, nbits, stats = backend.encode_payload(symbols, value_mode)
    mixture_bits, elias_bits, ideal, n_censored, m, distinct = stats
    assert nbits == mixture_bits + elias_bits
    return CodelengthReport(
        total_bits=nbits,
        mixture_bits=mixture_bits,
        elias_bits=elias_bits,
        n_censored=n_censored,
        threshold_m=m,
        ideal_mixture_bits=ideal,
        distinct=distinct,
    )


@dataclass(frozen=True)
class TraceEvent:
    position: int  # 1-based; n+1 is the terminator
    symbol: int | None
    threshold: int
    censored: bool
    excess: int | None
    model_total: int
    model_weight: int


def trace(symbols, rule: CensorRule = CensorRule.RANK) -> list[TraceEvent]:
    """Per-position account of the encoder decisions (terminator included)."""
    value_mode = rule is CensorRule.VALUE
    counts = CountTable()
    thr = ThresholdState()
    events = []
    n = len(symbols)
    for i in range(n + 1):
        terminator = i == n
        top = _threshold(thr, value_mode)
        view = counts.weights_view(top)
        x = None if terminator else symbols[i]
        if terminator:
            censored, excess, weight = True, 1, 1
        elif x > top:
            censored, excess, weight = True, x - top + 1, 1
        else:
            censored, excess, weight = False, None, view.weight(x)
        events.append(
            TraceEvent(
                position=i + 1,
                symbol=x,
                threshold=top,
                censored=censored,
                excess=excess,
                model_total=view.total,
                model_weight=weight,
            )
        )
        if not terminator:
            counts.record(x)
            thr.observe(x)
    return events
