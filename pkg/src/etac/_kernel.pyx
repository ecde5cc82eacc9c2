# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot path: fused encode/decode of whole messages.

Mirrors the pure modules (arith/ktmodel/threshold/elias/bitio) word for
word on the integer arithmetic, so payload bytes are identical; the test
suite pins that equivalence.  Symbols must fit in 62 bits; larger ones are
the pure path's business (see backend.py).
"""

from libc.stdlib cimport free, malloc, realloc
from libc.string cimport memset
from libc.math cimport log2

from bisect import bisect_right, insort

from .arith import ModelTotalError
from .errors import CorruptPayloadError, KernelRangeError, TrailingGarbageError

import numpy as np

ctypedef long long i64
ctypedef unsigned long long u64

cdef enum:
    REGISTER_BITS = 62

cdef u64 FULL = (<u64>1) << REGISTER_BITS
cdef u64 HALF = ((<u64>1) << REGISTER_BITS) >> 1
cdef u64 QUARTER = ((<u64>1) << REGISTER_BITS) >> 2
cdef u64 MAX_TOTAL = ((<u64>1) << REGISTER_BITS) >> 2
cdef i64 DENSE_LIMIT = (<i64>1) << 20
cdef i64 SYMBOL_LIMIT = (<i64>1) << 62


# ---------------------------------------------------------------- bit output

cdef class _BitWriter:
    cdef unsigned char* buf
    cdef Py_ssize_t cap
    cdef Py_ssize_t nbits

    def __cinit__(self):
        self.cap = 256
        self.buf = <unsigned char*>malloc(self.cap)
        if self.buf == NULL:
            raise MemoryError()
        memset(self.buf, 0, self.cap)
        self.nbits = 0

    def __dealloc__(self):
        if self.buf != NULL:
            free(self.buf)

    cdef void append(self, int bit) except *:
        cdef Py_ssize_t byte = self.nbits >> 3
        cdef Py_ssize_t newcap
        if byte >= self.cap:
            newcap = self.cap * 2
            self.buf = <unsigned char*>realloc(self.buf, newcap)
            if self.buf == NULL:
                raise MemoryError()
            memset(self.buf + self.cap, 0, newcap - self.cap)
            self.cap = newcap
        if bit:
            self.buf[byte] |= 1 << (7 - (self.nbits & 7))
        self.nbits += 1

    cdef bytes to_bytes(self):
        return self.buf[: (self.nbits + 7) >> 3]


# ------------------------------------------------------------ count structure

cdef class _Counts:
    cdef i64* count
    cdef i64* tree
    cdef i64 cap
    cdef list over_vals
    cdef dict over_counts
    cdef i64 n_recorded
    cdef i64 distinct

    def __cinit__(self):
        self.cap = 1024
        self.count = <i64*>malloc((self.cap + 1) * sizeof(i64))
        self.tree = <i64*>malloc((self.cap + 1) * sizeof(i64))
        if self.count == NULL or self.tree == NULL:
            raise MemoryError()
        memset(self.count, 0, (self.cap + 1) * sizeof(i64))
        memset(self.tree, 0, (self.cap + 1) * sizeof(i64))
        self.over_vals = []
        self.over_counts = {}
        self.n_recorded = 0
        self.distinct = 0

    def __dealloc__(self):
        if self.count != NULL:
            free(self.count)
        if self.tree != NULL:
            free(self.tree)

    cdef void _grow(self, i64 needed) except *:
        cdef i64 cap = self.cap
        cdef i64 i, j, v, c
        while cap < needed:
            cap *= 2
        self.count = <i64*>realloc(self.count, (cap + 1) * sizeof(i64))
        self.tree = <i64*>realloc(self.tree, (cap + 1) * sizeof(i64))
        if self.count == NULL or self.tree == NULL:
            raise MemoryError()
        memset(self.count + self.cap + 1, 0, (cap - self.cap) * sizeof(i64))
        for v in self.over_vals:
            if v <= cap:
                c = self.over_counts.pop(v)
                self.count[v] = c
        self.over_vals = [v for v in self.over_vals if v > cap]
        self.cap = cap
        # linear Fenwick rebuild
        memset(self.tree, 0, (cap + 1) * sizeof(i64))
        for i in range(1, cap + 1):
            self.tree[i] += self.count[i]
            j = i + (i & (-i))
            if j <= cap:
                self.tree[j] += self.tree[i]

    cdef void record(self, i64 j) except *:
        cdef i64 idx
        cdef object c
        self.n_recorded += 1
        if j > self.cap and j <= DENSE_LIMIT:
            self._grow(j)
        if j <= self.cap:
            if self.count[j] == 0:
                self.distinct += 1
            self.count[j] += 1
            idx = j
            while idx <= self.cap:
                self.tree[idx] += 1
                idx += idx & (-idx)
        else:
            c = self.over_counts.get(j)
            if c is None:
                self.distinct += 1
                insort(self.over_vals, j)
                self.over_counts[j] = 1
            else:
                self.over_counts[j] = c + 1

    cdef i64 count_of(self, i64 j):
        if j <= self.cap:
            return self.count[j]
        return self.over_counts.get(j, 0)

    cdef i64 prefix(self, i64 k):
        cdef i64 s = 0
        cdef i64 idx
        cdef Py_ssize_t stop, pos
        if k <= 0:
            return 0
        idx = k if k < self.cap else self.cap
        while idx > 0:
            s += self.tree[idx]
            idx -= idx & (-idx)
        if k > self.cap and len(self.over_vals) > 0:
            stop = bisect_right(self.over_vals, k)
            for pos in range(stop):
                s += <i64>self.over_counts[self.over_vals[pos]]
        return s

    cdef i64 cumlo(self, i64 j):
        if j == 0:
            return 0
        return j + 2 * self.prefix(j - 1)

    cdef i64 total(self, i64 top):
        return (top + 1) + 2 * self.prefix(top)

    cdef i64 find(self, i64 target, i64 top):
        # largest j in [0, top] with cumlo(j) <= target
        cdef i64 lo = 0, hi = top, mid
        while lo < hi:
            mid = (lo + hi + 1) >> 1
            if self.cumlo(mid) <= target:
                lo = mid
            else:
                hi = mid - 1
        return lo


# ------------------------------------------------------------- threshold heap

cdef class _Heap:
    cdef i64* a
    cdef Py_ssize_t size
    cdef Py_ssize_t cap

    def __cinit__(self):
        self.cap = 256
        self.a = <i64*>malloc(self.cap * sizeof(i64))
        if self.a == NULL:
            raise MemoryError()
        self.size = 0

    def __dealloc__(self):
        if self.a != NULL:
            free(self.a)

    cdef void push(self, i64 x) except *:
        cdef Py_ssize_t pos, parent
        cdef i64 tmp
        if self.size >= self.cap:
            self.cap *= 2
            self.a = <i64*>realloc(self.a, self.cap * sizeof(i64))
            if self.a == NULL:
                raise MemoryError()
        self.a[self.size] = x
        pos = self.size
        self.size += 1
        while pos > 0:
            parent = (pos - 1) >> 1
            if self.a[parent] > self.a[pos]:
                tmp = self.a[parent]
                self.a[parent] = self.a[pos]
                self.a[pos] = tmp
                pos = parent
            else:
                break

    cdef void pop_min(self):
        cdef Py_ssize_t pos = 0, child
        cdef i64 tmp
        self.size -= 1
        self.a[0] = self.a[self.size]
        while True:
            child = 2 * pos + 1
            if child >= self.size:
                break
            if child + 1 < self.size and self.a[child + 1] < self.a[child]:
                child += 1
            if self.a[child] < self.a[pos]:
                tmp = self.a[child]
                self.a[child] = self.a[pos]
                self.a[pos] = tmp
                pos = child
            else:
                break

    cdef void observe(self, i64 x):
        cdef i64 second
        self.push(x)
        while self.size >= 2:
            if self.size == 2:
                second = self.a[1]
            else:
                second = self.a[1] if self.a[1] < self.a[2] else self.a[2]
            if second < <i64>self.size:
                self.pop_min()
            else:
                break

    cdef i64 tau(self):
        return self.a[0] if self.size > 0 else 0


# ------------------------------------------------------------------- encoding

cdef void _elias_append(_BitWriter bits, i64 y) except *:
    cdef int length = 0, zeros = 0, shift
    cdef i64 t = y
    while t:
        length += 1
        t >>= 1
    t = length
    while t > 1:
        zeros += 1
        t >>= 1
    for shift in range(zeros):
        bits.append(0)
    for shift in range(zeros, -1, -1):
        bits.append((length >> shift) & 1)
    for shift in range(length - 2, -1, -1):
        bits.append((y >> shift) & 1)


def encode_message(symbols, bint value_mode):
    """Returns (payload bytes, payload bit length, stats tuple)."""
    cdef long long[::1] arr = np.ascontiguousarray(symbols, dtype=np.int64)
    cdef Py_ssize_t n = arr.shape[0]
    cdef _BitWriter bits = _BitWriter()
    cdef _Counts counts = _Counts()
    cdef _Heap heap = _Heap()

    cdef u64 low = 0, high = FULL - 1, span, step
    cdef i64 pending = 0
    cdef i64 top, x, cumlo, cumhi, total, w, excess
    cdef Py_ssize_t i
    cdef bint censored, terminator
    cdef double ideal = 0.0
    cdef i64 elias_bits = 0, n_censored = 0
    cdef Py_ssize_t before
    cdef int bit, opp

    for i in range(n):
        x = arr[i]
        if x < 1:
            raise ValueError(f"symbols must be positive integers, got {x}")
        if x >= SYMBOL_LIMIT:
            raise KernelRangeError(f"symbol {x} out of kernel range")

    for i in range(n + 1):
        terminator = i == n
        top = heap.tau() if value_mode else <i64>heap.size
        total = counts.total(top)
        if <u64>total > MAX_TOTAL:
            raise ModelTotalError(f"model total {total} exceeds {MAX_TOTAL}")
        if terminator:
            censored = True
        else:
            x = arr[i]
            censored = x > top
        if censored:
            cumlo = 0
            cumhi = 1
            ideal += log2(<double>total)
        else:
            cumlo = counts.cumlo(x)
            w = 2 * counts.count_of(x) + 1
            cumhi = cumlo + w
            ideal += log2(<double>total) - log2(<double>w)
        # interval narrowing, division first
        span = high - low + 1
        step = span // <u64>total
        if cumhi < total:
            high = low + step * <u64>cumhi - 1
        low += step * <u64>cumlo
        # renormalize
        while True:
            if high < HALF:
                bit = 0
            elif low >= HALF:
                bit = 1
                low -= HALF
                high -= HALF
            elif low >= QUARTER and high < 3 * QUARTER:
                pending += 1
                low -= QUARTER
                high -= QUARTER
                low <<= 1
                high = (high << 1) | 1
                continue
            else:
                break
            bits.append(bit)
            opp = bit ^ 1
            while pending:
                bits.append(opp)
                pending -= 1
            low <<= 1
            high = (high << 1) | 1
        if censored:
            # flush the block: pin a middle quarter inside [low, high]
            if low < QUARTER:
                bits.append(0)
                while pending:
                    bits.append(1)
                    pending -= 1
                bits.append(1)
            else:
                bits.append(1)
                while pending:
                    bits.append(0)
                    pending -= 1
                bits.append(0)
            low = 0
            high = FULL - 1
            pending = 0
            excess = 1 if terminator else x - top + 1
            before = bits.nbits
            _elias_append(bits, excess)
            elias_bits += bits.nbits - before
            if not terminator:
                n_censored += 1
        if not terminator:
            counts.record(x)
            heap.observe(x)

    cdef i64 nbits = bits.nbits
    cdef i64 mixture_bits = nbits - elias_bits
    stats = (mixture_bits, elias_bits, ideal, n_censored, <i64>heap.size, counts.distinct)
    return bits.to_bytes(), nbits, stats


# ------------------------------------------------------------------- decoding

cdef class _BitReader:
    # strict within true_bits for codeword reads; padded zero reads past the
    # end are only ever produced through next_padded (arith lookahead)
    cdef const unsigned char* buf
    cdef Py_ssize_t true_bits
    cdef Py_ssize_t pos
    cdef bytes keepalive

    def __cinit__(self, bytes payload):
        self.keepalive = payload
        self.buf = payload
        self.true_bits = 8 * len(payload)
        self.pos = 0

    cdef int next_padded(self):
        cdef int b = 0
        if self.pos < self.true_bits:
            b = (self.buf[self.pos >> 3] >> (7 - (self.pos & 7))) & 1
        self.pos += 1
        return b

    cdef int next_strict(self) except -1:
        if self.pos >= self.true_bits:
            raise CorruptPayloadError("truncated payload: read past end of stream")
        return self.next_padded()


cdef i64 _elias_read(_BitReader bits) except -1:
    cdef int zeros = 0, length, shift
    cdef i64 y
    while bits.next_strict() == 0:
        zeros += 1
        if zeros > 24:
            raise CorruptPayloadError("implausible codeword length prefix")
    length = 1
    for shift in range(zeros):
        length = (length << 1) | bits.next_strict()
    if length > 62:
        raise KernelRangeError("excess codeword out of kernel range")
    y = 1
    for shift in range(length - 1):
        y = (y << 1) | bits.next_strict()
    return y


def decode_message(bytes payload, bint value_mode):
    cdef _BitReader bits = _BitReader(payload)
    cdef _Counts counts = _Counts()
    cdef _Heap heap = _Heap()
    cdef list out = []

    cdef u64 low, high, value, span, step
    cdef i64 top, total, target, sym, cumlo, cumhi, w, excess, x
    cdef int k

    while True:
        top = heap.tau() if value_mode else <i64>heap.size
        # fresh block: refill the register
        low = 0
        high = FULL - 1
        value = 0
        for k in range(REGISTER_BITS):
            value = (value << 1) | <u64>bits.next_padded()
        while True:
            total = counts.total(top)
            if <u64>total > MAX_TOTAL:
                raise ModelTotalError(f"model total {total} exceeds {MAX_TOTAL}")
            if value < low or value > high:
                raise CorruptPayloadError("code value escaped the current interval")
            span = high - low + 1
            step = span // <u64>total
            target = <i64>((value - low) // step)
            if target >= total:
                target = total - 1
            sym = counts.find(target, top)
            if sym == 0:
                cumlo = 0
                cumhi = 1
            else:
                cumlo = counts.cumlo(sym)
                w = 2 * counts.count_of(sym) + 1
                cumhi = cumlo + w
            if cumhi < total:
                high = low + step * <u64>cumhi - 1
            low += step * <u64>cumlo
            while True:
                if high < HALF:
                    pass
                elif low >= HALF:
                    low -= HALF
                    high -= HALF
                    value -= HALF
                elif low >= QUARTER and high < 3 * QUARTER:
                    low -= QUARTER
                    high -= QUARTER
                    value -= QUARTER
                else:
                    break
                low <<= 1
                high = (high << 1) | 1
                value = (value << 1) | <u64>bits.next_padded()
            if sym == 0:
                break
            out.append(sym)
            counts.record(sym)
            heap.observe(sym)
            top = heap.tau() if value_mode else <i64>heap.size
        bits.pos -= REGISTER_BITS - 2  # return unconsumed lookahead
        if bits.pos > bits.true_bits:
            raise CorruptPayloadError("payload ends inside an arithmetic block")
        excess = _elias_read(bits)
        if excess == 1:
            break
        if excess - 1 > SYMBOL_LIMIT - top:
            raise KernelRangeError("decoded symbol out of kernel range")
        x = excess + top - 1
        out.append(x)
        counts.record(x)
        heap.observe(x)

    cdef Py_ssize_t p
    for p in range(bits.pos, bits.true_bits):
        if (bits.buf[p >> 3] >> (7 - (p & 7))) & 1:
            raise TrailingGarbageError("nonzero bits after the terminator")
    if bits.true_bits - bits.pos >= 8:
        raise TrailingGarbageError("extra bytes after the terminator")
    return out
