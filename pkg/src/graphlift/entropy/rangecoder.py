"""Multi-context adaptive range coder.

A 32-bit range coder with carry propagation through a cached byte (the
LZMA construction).  Each context owns a frequency table initialised to
all ones; after coding a symbol its count grows by ``INCREMENT`` and when
the context total exceeds ``RESCALE_LIMIT`` every count is halved,
rounding up.  The context of symbol ``n`` is symbol ``n - 1``; the first
symbol uses a dedicated start context.

Blob layout: 4-byte little-endian symbol count, then the coder payload.
An empty stream is just the count.
"""

from __future__ import annotations

import struct

import numpy as np

from .._accel import kernel

RESCALE_LIMIT = 1 << 14
INCREMENT = 1
TOP = 1 << 24
MAX_ALPHABET = 4096
MAX_SYMBOLS_PER_BYTE = 100_000

# coder state slots
LOW, RANGE, CACHE, CACHE_SIZE, POS = 0, 1, 2, 3, 4


class CorruptStreamError(ValueError):
    """Raised when a coded blob cannot be decoded consistently."""


@kernel
def rc_encoder_state():
    st = np.zeros(5, dtype=np.int64)
    st[RANGE] = 0xFFFFFFFF
    st[CACHE_SIZE] = 1
    return st


@kernel
def rc_shift_low(st, out):
    low = st[LOW]
    if low < 0xFF000000 or low > 0xFFFFFFFF:
        carry = low >> 32
        temp = st[CACHE]
        while True:
            out[st[POS]] = (temp + carry) & 0xFF
            st[POS] += 1
            temp = 0xFF
            st[CACHE_SIZE] -= 1
            if st[CACHE_SIZE] == 0:
                break
        st[CACHE] = (low >> 24) & 0xFF
    st[CACHE_SIZE] += 1
    st[LOW] = (low & 0x00FFFFFF) << 8


@kernel
def rc_encode(st, out, cum_low, freq, total):
    r = st[RANGE] // total
    st[LOW] += r * cum_low
    st[RANGE] = r * freq
    while st[RANGE] < TOP:
        st[RANGE] <<= 8
        rc_shift_low(st, out)


@kernel
def rc_flush(st, out):
    for _ in range(5):
        rc_shift_low(st, out)
    return st[POS]


@kernel
def rc_decoder_state(data):
    # slots: code, range, read position, overrun flag
    st = np.zeros(4, dtype=np.int64)
    st[1] = 0xFFFFFFFF
    for _ in range(5):
        b = 0
        if st[2] < data.shape[0]:
            b = data[st[2]]
        else:
            st[3] = 1
        st[2] += 1
        st[0] = (st[0] << 8) | b
    return st


@kernel
def rc_decode_target(st, total):
    """Scaled code value for symbol lookup, or -1 if the stream is corrupt."""
    r = st[1] // total
    if r == 0:
        return -1
    v = st[0] // r
    if v >= total:
        return -1
    return v


@kernel
def rc_decode_update(st, data, cum_low, freq, total):
    r = st[1] // total
    st[0] -= r * cum_low
    st[1] = r * freq
    while st[1] < TOP:
        b = 0
        if st[2] < data.shape[0]:
            b = data[st[2]]
        else:
            st[3] = 1
        st[2] += 1
        st[0] = ((st[0] << 8) | b) & 0xFFFFFFFF
        st[1] <<= 8


@kernel
def model_update(freqs, totals, ctx, sym):
    freqs[ctx, sym] += INCREMENT
    totals[ctx] += INCREMENT
    if totals[ctx] > RESCALE_LIMIT:
        t = 0
        for k in range(freqs.shape[1]):
            f = (freqs[ctx, k] + 1) // 2
            freqs[ctx, k] = f
            t += f
        totals[ctx] = t


@kernel
def _encode_prev_context(symbols, alphabet):
    n = symbols.shape[0]
    freqs = np.ones((alphabet + 1, alphabet), dtype=np.int64)
    totals = np.full(alphabet + 1, alphabet, dtype=np.int64)
    out = np.zeros(2 * n + 16, dtype=np.uint8)
    st = rc_encoder_state()
    ctx = alphabet
    for i in range(n):
        s = symbols[i]
        cum = 0
        for k in range(s):
            cum += freqs[ctx, k]
        rc_encode(st, out, cum, freqs[ctx, s], totals[ctx])
        model_update(freqs, totals, ctx, s)
        ctx = s
    size = rc_flush(st, out)
    return out[:size]


@kernel
def _decode_prev_context(data, count, alphabet):
    out = np.zeros(count, dtype=np.int64)
    freqs = np.ones((alphabet + 1, alphabet), dtype=np.int64)
    totals = np.full(alphabet + 1, alphabet, dtype=np.int64)
    st = rc_decoder_state(data)
    ctx = alphabet
    for i in range(count):
        total = totals[ctx]
        v = rc_decode_target(st, total)
        if v < 0:
            return out, -1
        s = 0
        cum = 0
        while cum + freqs[ctx, s] <= v:
            cum += freqs[ctx, s]
            s += 1
        rc_decode_update(st, data, cum, freqs[ctx, s], total)
        out[i] = s
        model_update(freqs, totals, ctx, s)
        ctx = s
    return out, st[2]


def ac_encode(symbols, alphabet_size: int) -> bytes:
    """Code ``symbols`` (ints in ``[0, alphabet_size)``) with previous-symbol contexts."""
    s = np.ascontiguousarray(symbols, dtype=np.int64).ravel()
    if not 1 <= alphabet_size <= MAX_ALPHABET:
        raise ValueError(f"alphabet_size must be in 1..{MAX_ALPHABET}")
    if s.size and (s.min() < 0 or s.max() >= alphabet_size):
        raise ValueError(f"symbol outside [0, {alphabet_size})")
    head = struct.pack("<I", s.size)
    if s.size == 0:
        return head
    return head + _encode_prev_context(s, alphabet_size).tobytes()


def ac_decode(blob: bytes, alphabet_size: int) -> np.ndarray:
    if len(blob) < 4:
        raise CorruptStreamError("blob shorter than its 4-byte count")
    (count,) = struct.unpack_from("<I", blob)
    payload = np.frombuffer(blob, dtype=np.uint8, offset=4)
    if count == 0:
        if payload.size:
            raise CorruptStreamError("trailing bytes after an empty stream")
        return np.zeros(0, dtype=np.int64)
    # the most probable symbol still costs >= 1/(2^14 ln 2) bits
    if count > MAX_SYMBOLS_PER_BYTE * payload.size:
        raise CorruptStreamError("implausible symbol count")
    out, consumed = _decode_prev_context(payload, count, alphabet_size)
    if consumed != payload.size:
        raise CorruptStreamError(
            f"length mismatch: decoder consumed {consumed} of {payload.size} payload bytes"
        )
    return out
