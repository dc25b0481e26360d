"""Lossless spatial coding of LP/HP frames.

Reversible integer LeGall 5/3 lifting (separable, whole-sample symmetric
extension, Mallat layout) followed by magnitude-class coding: every
coefficient is folded to ``u = 2v`` (``v >= 0``) or ``-2v - 1``, its bit
length ``c`` is range coded with the previous coefficient's class as
context, and the ``c - 1`` bits below the leading one are stored raw.

Blob layout (little endian)::

    u32 height | u32 width | u8 levels | u32 class_blob_len | class_blob | raw bits
"""

from __future__ import annotations

import struct

import numpy as np

from .entropy.rangecoder import CorruptStreamError, ac_decode, ac_encode

DEFAULT_LEVELS = 4
N_CLASSES = 40
_HEAD = struct.Struct("<IIBI")


def _fwd_1d(x: np.ndarray) -> np.ndarray:
    n = x.shape[-1]
    if n < 2:
        return x.copy()
    even = x[..., 0::2]
    odd = x[..., 1::2]
    no = odd.shape[-1]
    if n % 2 == 0:
        even_next = np.concatenate([even[..., 1:], even[..., -1:]], axis=-1)
    else:
        even_next = even[..., 1:]
    d = odd - ((even[..., :no] + even_next) >> 1)
    if n % 2 == 0:
        d_prev = np.concatenate([d[..., :1], d[..., :-1]], axis=-1)
        d_cur = d
    else:
        d_prev = np.concatenate([d[..., :1], d], axis=-1)
        d_cur = np.concatenate([d, d[..., -1:]], axis=-1)
    s = even + ((d_prev + d_cur + 2) >> 2)
    return np.concatenate([s, d], axis=-1)


def _inv_1d(c: np.ndarray) -> np.ndarray:
    n = c.shape[-1]
    if n < 2:
        return c.copy()
    ne = (n + 1) // 2
    s = c[..., :ne]
    d = c[..., ne:]
    if n % 2 == 0:
        d_prev = np.concatenate([d[..., :1], d[..., :-1]], axis=-1)
        d_cur = d
    else:
        d_prev = np.concatenate([d[..., :1], d], axis=-1)
        d_cur = np.concatenate([d, d[..., -1:]], axis=-1)
    even = s - ((d_prev + d_cur + 2) >> 2)
    if n % 2 == 0:
        even_next = np.concatenate([even[..., 1:], even[..., -1:]], axis=-1)
    else:
        even_next = even[..., 1:]
    odd = d + ((even[..., : d.shape[-1]] + even_next) >> 1)
    out = np.empty(c.shape, dtype=c.dtype)
    out[..., 0::2] = even
    out[..., 1::2] = odd
    return out


def _level_shapes(h: int, w: int, levels: int) -> list[tuple[int, int]]:
    shapes = [(h, w)]
    for _ in range(levels):
        h, w = (h + 1) // 2, (w + 1) // 2
        shapes.append((h, w))
    return shapes


def dwt53_forward(frame, levels: int = DEFAULT_LEVELS) -> np.ndarray:
    if levels < 0:
        raise ValueError("levels must be >= 0")
    c = np.array(frame, dtype=np.int64, copy=True)
    for h, w in _level_shapes(*c.shape, levels)[:-1]:
        region = _fwd_1d(c[:h, :w])
        c[:h, :w] = _fwd_1d(region.T).T
    return c


def dwt53_inverse(coeffs, levels: int = DEFAULT_LEVELS) -> np.ndarray:
    if levels < 0:
        raise ValueError("levels must be >= 0")
    c = np.array(coeffs, dtype=np.int64, copy=True)
    for h, w in reversed(_level_shapes(*c.shape, levels)[:-1]):
        region = _inv_1d(c[:h, :w].T).T
        c[:h, :w] = _inv_1d(region)
    return c


def subband_regions(h: int, w: int, levels: int) -> list[tuple[slice, slice]]:
    """Coding order: coarsest LL, then HL, LH, HH from coarse to fine."""
    shapes = _level_shapes(h, w, levels)
    lh, lw = shapes[-1]
    regions = [(slice(0, lh), slice(0, lw))]
    for (ph, pw), (ch, cw) in zip(reversed(shapes[:-1]), reversed(shapes[1:])):
        regions += [
            (slice(0, ch), slice(cw, pw)),
            (slice(ch, ph), slice(0, cw)),
            (slice(ch, ph), slice(cw, pw)),
        ]
    return regions


def _bit_length(u: np.ndarray) -> np.ndarray:
    c = np.zeros(u.shape, dtype=np.int64)
    v = u.copy()
    while np.any(v):
        nz = v > 0
        c[nz] += 1
        v >>= 1
    return c


def encode_subband_frame(frame, levels: int = DEFAULT_LEVELS) -> bytes:
    f = np.asarray(frame, dtype=np.int64)
    if f.ndim != 2:
        raise ValueError("frame must be 2-D")
    h, w = f.shape
    coeffs = dwt53_forward(f, levels)
    flat = np.concatenate([coeffs[r].ravel() for r in subband_regions(h, w, levels)]) if f.size else np.zeros(0, np.int64)
    u = np.where(flat >= 0, 2 * flat, -2 * flat - 1)
    classes = _bit_length(u)
    if classes.size and classes.max() >= N_CLASSES:
        raise ValueError("coefficient magnitude out of range")
    class_blob = ac_encode(classes, N_CLASSES)
    bits = []
    for b in range(int(classes.max(initial=1)) - 2, -1, -1):
        sel = classes - 1 > b
        bits.append(((u[sel] >> b) & 1).astype(np.uint8))
    raw = np.packbits(np.concatenate(bits)) if bits else np.zeros(0, np.uint8)
    return _HEAD.pack(h, w, levels, len(class_blob)) + class_blob + raw.tobytes()


def decode_subband_frame(blob: bytes) -> np.ndarray:
    if len(blob) < _HEAD.size:
        raise CorruptStreamError("subband blob too short")
    h, w, levels, n_class = _HEAD.unpack_from(blob)
    start = _HEAD.size
    if start + n_class > len(blob):
        raise CorruptStreamError("class stream overruns the subband blob")
    classes = ac_decode(bytes(blob[start:start + n_class]), N_CLASSES)
    if classes.size != h * w:
        raise CorruptStreamError(f"expected {h * w} coefficients, got {classes.size}")
    raw = np.unpackbits(np.frombuffer(blob, dtype=np.uint8, offset=start + n_class))
    n_bits = int(np.maximum(classes - 1, 0).sum())
    if raw.size < n_bits or raw.size - n_bits >= 8:
        raise CorruptStreamError("refinement bit count mismatch")
    u = np.where(classes > 0, np.int64(1) << np.maximum(classes - 1, 0), 0)
    pos = 0
    for b in range(int(classes.max(initial=1)) - 2, -1, -1):
        sel = classes - 1 > b
        k = int(sel.sum())
        u[sel] |= raw[pos:pos + k].astype(np.int64) << b
        pos += k
    flat = np.where(u % 2 == 0, u >> 1, -((u + 1) >> 1))
    coeffs = np.zeros((h, w), dtype=np.int64)
    pos = 0
    for r in subband_regions(h, w, levels):
        shape = coeffs[r].shape
        n = shape[0] * shape[1]
        coeffs[r] = flat[pos:pos + n].reshape(shape)
        pos += n
    return dwt53_inverse(coeffs, levels)
