"""Context-modelled binary image coder (JBIG-style, not the ITU bitstream).

Each pixel is coded with an adaptive binary model selected by a 10-pixel
causal template, pixels outside the image read as 0::

    row y-2:        x-1  x  x+1
    row y-1:   x-2  x-1  x  x+1  x+2
    row y  :   x-2  x-1  ?

Blob layout: 4-byte little-endian pixel count, then the range-coder payload.
"""

from __future__ import annotations

import struct

import numpy as np

from .._accel import kernel
from .rangecoder import (
    MAX_SYMBOLS_PER_BYTE,
    CorruptStreamError,
    model_update,
    rc_decode_target,
    rc_decode_update,
    rc_decoder_state,
    rc_encode,
    rc_encoder_state,
    rc_flush,
)

N_CONTEXTS = 1 << 10


@kernel
def _pix(img, y, x):
    if y < 0 or x < 0 or x >= img.shape[1]:
        return 0
    return img[y, x]


@kernel
def template_context(img, y, x):
    c = 0
    c = (c << 1) | _pix(img, y - 2, x - 1)
    c = (c << 1) | _pix(img, y - 2, x)
    c = (c << 1) | _pix(img, y - 2, x + 1)
    c = (c << 1) | _pix(img, y - 1, x - 2)
    c = (c << 1) | _pix(img, y - 1, x - 1)
    c = (c << 1) | _pix(img, y - 1, x)
    c = (c << 1) | _pix(img, y - 1, x + 1)
    c = (c << 1) | _pix(img, y - 1, x + 2)
    c = (c << 1) | _pix(img, y, x - 2)
    c = (c << 1) | _pix(img, y, x - 1)
    return c


@kernel
def _encode_bilevel(img):
    h, w = img.shape
    freqs = np.ones((N_CONTEXTS, 2), dtype=np.int64)
    totals = np.full(N_CONTEXTS, 2, dtype=np.int64)
    out = np.zeros(2 * h * w + 16, dtype=np.uint8)
    st = rc_encoder_state()
    for y in range(h):
        for x in range(w):
            ctx = template_context(img, y, x)
            b = img[y, x]
            cum = 0
            if b == 1:
                cum = freqs[ctx, 0]
            rc_encode(st, out, cum, freqs[ctx, b], totals[ctx])
            model_update(freqs, totals, ctx, b)
    size = rc_flush(st, out)
    return out[:size]


@kernel
def _decode_bilevel(data, h, w):
    img = np.zeros((h, w), dtype=np.int64)
    freqs = np.ones((N_CONTEXTS, 2), dtype=np.int64)
    totals = np.full(N_CONTEXTS, 2, dtype=np.int64)
    st = rc_decoder_state(data)
    for y in range(h):
        for x in range(w):
            ctx = template_context(img, y, x)
            total = totals[ctx]
            v = rc_decode_target(st, total)
            if v < 0:
                return img, -1
            b = 0
            cum = 0
            if v >= freqs[ctx, 0]:
                b = 1
                cum = freqs[ctx, 0]
            rc_decode_update(st, data, cum, freqs[ctx, b], total)
            img[y, x] = b
            model_update(freqs, totals, ctx, b)
    return img, st[2]


def bilevel_encode(mask) -> bytes:
    m = np.asarray(mask)
    if m.ndim != 2:
        raise ValueError("mask must be 2-D")
    head = struct.pack("<I", m.size)
    if m.size == 0:
        return head
    return head + _encode_bilevel(np.ascontiguousarray(m != 0, dtype=np.int64)).tobytes()


def bilevel_decode(blob: bytes, width: int, height: int) -> np.ndarray:
    if len(blob) < 4:
        raise CorruptStreamError("blob shorter than its 4-byte count")
    (count,) = struct.unpack_from("<I", blob)
    if count != width * height:
        raise CorruptStreamError(f"blob holds {count} pixels, expected {width * height}")
    payload = np.frombuffer(blob, dtype=np.uint8, offset=4)
    if count == 0:
        return np.zeros((height, width), dtype=np.uint8)
    if count > MAX_SYMBOLS_PER_BYTE * payload.size:
        raise CorruptStreamError("implausible pixel count")
    img, consumed = _decode_bilevel(payload, height, width)
    if consumed != payload.size:
        raise CorruptStreamError(
            f"length mismatch: decoder consumed {consumed} of {payload.size} payload bytes"
        )
    return img.astype(np.uint8)
