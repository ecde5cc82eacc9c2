import random

import pytest

from etac.bitio import BitCursor, BitString, TruncatedStreamError, write_bit


def test_single_append():
    s = write_bit(BitString(), 1)
    assert len(s) == 1
    assert s.to01() == "1"


def test_append_to_existing():
    s = BitString([1, 0])
    write_bit(s, 0)
    assert s.to01() == "100"


def test_msb_first_packing():
    s = BitString([0, 1, 0, 0, 0, 1, 0, 1])
    assert s.to_bytes() == b"\x45"


def test_final_byte_zero_padded():
    s = BitString([1, 1, 1])
    assert s.to_bytes() == bytes([0b11100000])


def test_append_rejects_non_bits():
    with pytest.raises(ValueError):
        BitString().append(2)


def test_read_bits_basic():
    cur = BitCursor(BitString([0, 1, 0, 0]))
    assert cur.read_bits(2).to01() == "01"
    assert cur.position == 2


def test_read_zero_bits_is_identity():
    cur = BitCursor(BitString([1, 0]))
    assert len(cur.read_bits(0)) == 0
    assert cur.position == 0


def test_read_past_end_raises():
    cur = BitCursor(BitString([1]))
    with pytest.raises(TruncatedStreamError):
        cur.read_bits(2)


def test_rollback_positions():
    cur = BitCursor(BitString([1] * 8))
    cur.read_bits(5)
    cur.rollback(2)
    assert cur.position == 3
    cur.rollback(0)
    assert cur.position == 3
    assert cur.high_water == 5


def test_rollback_redelivers_same_bit():
    cur = BitCursor(BitString([1, 0, 1, 1]))
    third = cur.read_bits(3)[2]
    cur.rollback(1)
    assert cur.read_bit() == third


def test_rollback_below_zero_rejected():
    cur = BitCursor(BitString([1, 0]))
    cur.read_bit()
    with pytest.raises(ValueError):
        cur.rollback(2)


def test_roundtrip_through_bytes():
    rng = random.Random(12)
    for _ in range(200):
        n = rng.randrange(0, 70)
        bits = [rng.randrange(2) for _ in range(n)]
        s = BitString(bits)
        back = BitString.from_bytes(s.to_bytes(), n)
        assert list(back) == bits
        # padding is only trailing zeros, less than a byte of them
        full = BitString.from_bytes(s.to_bytes())
        assert list(full)[:n] == bits
        assert all(b == 0 for b in list(full)[n:])
        assert len(full) - n < 8


def test_rollback_interleavings_equivalent():
    rng = random.Random(99)
    for _ in range(100):
        n = rng.randrange(10, 120)
        s = BitString([rng.randrange(2) for _ in range(n)])
        cur = BitCursor(s)
        pos = 0
        for _ in range(30):
            if rng.random() < 0.6:
                k = rng.randrange(0, n - pos + 1)
                cur.read_bits(k)
                pos += k
            else:
                k = rng.randrange(0, pos + 1)
                cur.rollback(k)
                pos -= k
        assert cur.position == pos
        tail = cur.read_bits(n - pos)
        assert list(tail) == [s[i] for i in range(pos, n)]


def test_append_uint_matches_bits():
    s = BitString()
    s.append_uint(0b1011, 4)
    assert s.to01() == "1011"
    s.append_uint(0, 0)
    assert s.to01() == "1011"
    with pytest.raises(ValueError):
        s.append_uint(4, 2)
