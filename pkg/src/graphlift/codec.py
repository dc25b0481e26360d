"""Container format and the encode/decode pipelines.

Byte layout (all integers little endian)::

    "GWLC"  u8 version
    u32 X  u32 Y  u32 Z  u32 T
    u8 bit_depth  u8 r_max  u8 k  u8 method  u8 mc  u8 block_size
    for z in 0..Z-1:
        for each frame pair (f_{2t-1}, f_{2t}):
            chunk 'B'  coded binary mask        (empty unless mc = graph)
            chunk 'M'  coded motion symbols     (graph stream / block vectors / empty)
            chunk 'L'  coded LP frame
            chunk 'H'  coded HP frame
        if T is odd:
            chunk 'U'  coded unpaired last frame (carried as an extra LP frame)

    chunk := u8 tag | u32 length | u32 crc32(payload) | payload

The checksum is verified when a payload is read, so skipped payloads
(HP in base-layer decoding) are never touched.

``method``: 0 nearest, 1 linear, 2 natural.  ``mc``: 0 none, 1 graph,
2 block.  The PSNR target and the radius intervals are encoder-only
choices: the decoder learns everything it needs from B and the stream.
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass, field

import numpy as np

from . import block as blk
from .entropy import (
    CorruptStreamError,
    ac_decode,
    ac_encode,
    bilevel_decode,
    bilevel_encode,
    delete_zeros,
    hilbert_scan,
    hilbert_unscan,
    reinsert_zeros,
)
from .graph_mc import ReducedAdjacency, estimate_motion
from .lifting import SubbandPair, mctf_forward, mctf_inverse
from .motion_map import (
    adjacency_to_map,
    alphabet_size,
    apply_mask,
    build_binary_mask,
    compute_threshold,
    map_to_adjacency,
    radius_assignment,
)
from .sampling import METHODS, N_DENSITIES, build_sampling_mask, interpolate, subsample
from .subband import DEFAULT_LEVELS, decode_subband_frame, encode_subband_frame
from .volume_io import Volume

MAGIC = b"GWLC"
VERSION = 1
_HEADER = struct.Struct("<4sBIIIIBBBBBB")
_CHUNK = struct.Struct("<cII")
MC_MODES = ("none", "graph", "block")
DEFAULT_PSNR_TARGET = 50.0

TAG_MASK, TAG_MOTION, TAG_LP, TAG_HP, TAG_UNPAIRED = b"B", b"M", b"L", b"H", b"U"
PAIR_TAGS = (TAG_MASK, TAG_MOTION, TAG_LP, TAG_HP)


@dataclass
class CodecConfig:
    """Encoder settings.

    ``psnr_target`` drives the binary mask; ``math.inf`` transmits every
    motion symbol.  ``smooth=False`` searches the full ``r_max`` box at
    every pixel instead of the difference-driven radius map.
    """

    r_max: int = 3
    psnr_target: float = DEFAULT_PSNR_TARGET
    k: int = 16
    method: str = "nearest"
    mc: str = "graph"
    block_size: int = 4
    smooth: bool = True
    levels: int = DEFAULT_LEVELS

    def validate(self) -> None:
        if not 1 <= self.r_max <= 3:
            raise ValueError(f"r_max must be in 1..3, got {self.r_max}")
        if not 1 <= self.k <= N_DENSITIES:
            raise ValueError(f"density index k must be in 1..{N_DENSITIES}, got {self.k}")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.mc not in MC_MODES:
            raise ValueError(f"mc must be one of {MC_MODES}, got {self.mc!r}")
        if self.block_size not in blk.BLOCK_SIZES:
            raise ValueError(f"block_size must be one of {blk.BLOCK_SIZES}, got {self.block_size}")
        if not self.psnr_target > 0:
            raise ValueError("psnr_target must be positive")
        if self.levels != DEFAULT_LEVELS:
            raise ValueError(f"the container fixes {DEFAULT_LEVELS} spatial levels")


@dataclass(frozen=True)
class ContainerHeader:
    width: int
    height: int
    slices: int
    frames: int
    bit_depth: int
    r_max: int
    k: int
    method: str
    mc: str
    block_size: int

    def pack(self) -> bytes:
        return _HEADER.pack(
            MAGIC, VERSION, self.width, self.height, self.slices, self.frames,
            self.bit_depth, self.r_max, self.k, METHODS.index(self.method),
            MC_MODES.index(self.mc), self.block_size,
        )

    @classmethod
    def unpack(cls, data) -> "ContainerHeader":
        if len(data) < _HEADER.size:
            raise CorruptStreamError("container shorter than its header")
        magic, version, x, y, z, t, bd, r_max, k, method, mc, bs = _HEADER.unpack_from(data)
        if magic != MAGIC:
            raise CorruptStreamError("not a graphlift container (bad magic)")
        if version != VERSION:
            raise CorruptStreamError(f"unsupported container version {version}")
        if method >= len(METHODS) or mc >= len(MC_MODES):
            raise CorruptStreamError("unknown method or mc mode")
        if min(x, y, z, t) < 1 or not 1 <= bd <= 16 or not 1 <= r_max <= 3 or not 1 <= k <= N_DENSITIES:
            raise CorruptStreamError("header field out of range")
        if bs not in blk.BLOCK_SIZES:
            raise CorruptStreamError(f"invalid block size {bs}")
        return cls(x, y, z, t, bd, r_max, k, METHODS[method], MC_MODES[mc], bs)

    @property
    def pairs(self) -> int:
        return self.frames // 2


@dataclass
class Chunk:
    tag: bytes
    offset: int  # payload offset within the container
    length: int
    crc: int


@dataclass
class Container:
    """Parsed chunk index over container bytes (payloads are not decoded)."""

    header: ContainerHeader
    chunks: list[Chunk]
    size: int

    def expected_tags(self) -> list[bytes]:
        h = self.header
        per_slice = list(PAIR_TAGS) * h.pairs + ([TAG_UNPAIRED] if h.frames % 2 else [])
        return per_slice * h.slices


def read_container(data: bytes) -> Container:
    header = ContainerHeader.unpack(data)
    pos = _HEADER.size
    chunks = []
    while pos < len(data):
        if pos + _CHUNK.size > len(data):
            raise CorruptStreamError("truncated chunk header")
        tag, length, crc = _CHUNK.unpack_from(data, pos)
        pos += _CHUNK.size
        if pos + length > len(data):
            raise CorruptStreamError(f"chunk {tag!r} overruns the container")
        chunks.append(Chunk(tag, pos, length, crc))
        pos += length
    container = Container(header, chunks, len(data))
    if [c.tag for c in chunks] != container.expected_tags():
        raise CorruptStreamError("chunk sequence does not match the header")
    return container


@dataclass
class PairCoding:
    """Encoder-side record of one transformed frame pair."""

    z: int
    t: int
    f_odd: np.ndarray
    f_even: np.ndarray
    adjacency: ReducedAdjacency
    lp: np.ndarray
    hp: np.ndarray
    mask: np.ndarray | None = None
    chunk_sizes: dict = field(default_factory=dict)


def _chunk(tag: bytes, payload: bytes) -> bytes:
    return _CHUNK.pack(tag, len(payload), zlib.crc32(payload)) + payload


def encode_pair(f_odd, f_even, config: CodecConfig, a_max: int):
    """Code the motion of one pair and transform it.

    Returns ``(mask_blob, motion_blob, adjacency, mask, pair)`` where
    ``adjacency`` is the one the decoder rebuilds from the two blobs.
    """
    f_odd = np.asarray(f_odd, dtype=np.int64)
    f_even = np.asarray(f_even, dtype=np.int64)
    h, w = f_odd.shape
    mask = None
    if config.mc == "none":
        adjacency = ReducedAdjacency.identity(h, w)
        mask_blob = motion_blob = b""
    elif config.mc == "block":
        mvf = blk.block_search(f_odd, f_even, config.block_size, config.r_max)
        adjacency = blk.block_adjacency(mvf, h, w, config.block_size)
        mask_blob = b""
        motion_blob = blk.mv_encode(mvf, config.r_max)
    else:
        if config.smooth:
            radius = radius_assignment(f_odd, f_even, config.r_max)
        else:
            radius = np.full((h, w), config.r_max, dtype=np.int64)
        estimated = estimate_motion(f_odd, f_even, radius)
        full_map = adjacency_to_map(estimated, config.r_max)
        tau = compute_threshold(f_odd, f_even, config.psnr_target, a_max)
        mask = build_binary_mask(f_odd, f_even, tau)
        sampling = build_sampling_mask(config.k, w, h)
        sub_map = subsample(apply_mask(full_map, mask), sampling)
        # closed loop: transform with exactly the map the decoder will rebuild
        rebuilt = interpolate(sub_map, mask, sampling, config.r_max, config.method)
        adjacency = map_to_adjacency(rebuilt, config.r_max)
        stream = delete_zeros(hilbert_scan(sub_map), mask, sampling)
        mask_blob = bilevel_encode(mask)
        motion_blob = ac_encode(stream - 1, alphabet_size(config.r_max))
    pair = mctf_forward(f_odd, f_even, adjacency)
    return mask_blob, motion_blob, adjacency, mask, pair


def encode_volume(volume: Volume, config: CodecConfig | None = None, *, collect: list | None = None) -> bytes:
    """Encode a volume into container bytes.

    If ``collect`` is a list, one :class:`PairCoding` per frame pair is
    appended to it (used by the metrics harness).
    """
    config = config or CodecConfig()
    config.validate()
    samples = volume.samples
    n_t, n_z, h, w = samples.shape
    if samples.size == 0:
        raise ValueError(f"cannot encode an empty volume of shape {samples.shape}")
    a_max = (1 << volume.bit_depth) - 1
    header = ContainerHeader(w, h, n_z, n_t, volume.bit_depth, config.r_max, config.k,
                             config.method, config.mc, config.block_size)
    parts = [header.pack()]
    for z in range(n_z):
        for t in range(n_t // 2):
            f_odd = samples[2 * t, z]
            f_even = samples[2 * t + 1, z]
            mask_blob, motion_blob, adjacency, mask, pair = encode_pair(f_odd, f_even, config, a_max)
            lp_blob = encode_subband_frame(pair.lp, config.levels)
            hp_blob = encode_subband_frame(pair.hp, config.levels)
            parts += [_chunk(TAG_MASK, mask_blob), _chunk(TAG_MOTION, motion_blob),
                      _chunk(TAG_LP, lp_blob), _chunk(TAG_HP, hp_blob)]
            if collect is not None:
                collect.append(PairCoding(
                    z, t, np.asarray(f_odd, dtype=np.int64), np.asarray(f_even, dtype=np.int64),
                    adjacency, pair.lp, pair.hp, mask,
                    {"B": len(mask_blob), "M": len(motion_blob), "L": len(lp_blob), "H": len(hp_blob)},
                ))
        if n_t % 2:
            parts.append(_chunk(TAG_UNPAIRED, encode_subband_frame(samples[n_t - 1, z], config.levels)))
    return b"".join(parts)


class _ChunkReader:
    """Sequential chunk access that counts the payload bytes it touches."""

    def __init__(self, data, container: Container):
        self.data = memoryview(data)
        self.chunks = iter(container.chunks)
        self.read_bytes: dict[str, int] = {}
        self.skipped_bytes: dict[str, int] = {}

    def _next(self, tag: bytes) -> Chunk:
        chunk = next(self.chunks)
        if chunk.tag != tag:
            raise CorruptStreamError(f"expected chunk {tag!r}, found {chunk.tag!r}")
        return chunk

    def read(self, tag: bytes) -> bytes:
        chunk = self._next(tag)
        key = tag.decode()
        self.read_bytes[key] = self.read_bytes.get(key, 0) + chunk.length
        payload = bytes(self.data[chunk.offset:chunk.offset + chunk.length])
        if zlib.crc32(payload) != chunk.crc:
            raise CorruptStreamError(f"checksum mismatch in chunk {tag!r} at offset {chunk.offset}")
        return payload

    def skip(self, tag: bytes) -> None:
        chunk = self._next(tag)
        key = tag.decode()
        self.skipped_bytes[key] = self.skipped_bytes.get(key, 0) + chunk.length


def decode_pair_adjacency(header: ContainerHeader, mask_blob: bytes, motion_blob: bytes):
    """Rebuild the prediction adjacency (and mask) of one pair from its chunks."""
    w, h = header.width, header.height
    if header.mc == "none":
        if mask_blob or motion_blob:
            raise CorruptStreamError("motion data present with mc = none")
        return ReducedAdjacency.identity(h, w), None
    if header.mc == "block":
        if mask_blob:
            raise CorruptStreamError("mask present with mc = block")
        n_by, n_bx = blk.block_grid(h, w, header.block_size)
        try:
            mvf = blk.mv_decode(motion_blob, n_by, n_bx, header.r_max)
        except ValueError as exc:
            raise CorruptStreamError(str(exc)) from exc
        return blk.block_adjacency(mvf, h, w, header.block_size), None
    mask = bilevel_decode(mask_blob, w, h)
    sampling = build_sampling_mask(header.k, w, h)
    stream = ac_decode(motion_blob, alphabet_size(header.r_max)) + 1
    try:
        sub_map = hilbert_unscan(reinsert_zeros(stream, mask, sampling), w, h)
        rebuilt = interpolate(sub_map, mask, sampling, header.r_max, header.method)
        adjacency = map_to_adjacency(rebuilt, header.r_max)
    except ValueError as exc:
        raise CorruptStreamError(f"invalid motion data: {exc}") from exc
    return adjacency, mask


def _decode_frame(blob: bytes, header: ContainerHeader) -> np.ndarray:
    frame = decode_subband_frame(blob)
    if frame.shape != (header.height, header.width):
        raise CorruptStreamError("coded frame has the wrong dimensions")
    return frame


def decode_volume(data: bytes, mode: str = "full", *, stats: dict | None = None,
                  collect: list | None = None) -> Volume:
    """Decode container bytes.

    ``mode="full"`` reproduces the original volume exactly.  ``"bl_only"``
    returns the base layer: the ``ceil(T/2)`` LP frames per slice, without
    reading mask, motion or HP payloads.  ``stats`` receives the per-tag
    counts of payload bytes read and skipped.
    """
    if mode not in ("full", "bl_only"):
        raise ValueError(f"mode must be 'full' or 'bl_only', got {mode!r}")
    container = read_container(data)
    header = container.header
    reader = _ChunkReader(data, container)
    a_max = (1 << header.bit_depth) - 1
    n_out = header.frames if mode == "full" else -(-header.frames // 2)
    out = np.zeros((n_out, header.slices, header.height, header.width), dtype=np.int64)
    for z in range(header.slices):
        for t in range(header.pairs):
            if mode == "bl_only":
                reader.skip(TAG_MASK)
                reader.skip(TAG_MOTION)
                out[t, z] = _decode_frame(reader.read(TAG_LP), header)
                reader.skip(TAG_HP)
                continue
            adjacency, mask = decode_pair_adjacency(header, reader.read(TAG_MASK), reader.read(TAG_MOTION))
            lp = _decode_frame(reader.read(TAG_LP), header)
            hp = _decode_frame(reader.read(TAG_HP), header)
            f_odd, f_even = mctf_inverse(SubbandPair(lp, hp), adjacency)
            out[2 * t, z] = f_odd
            out[2 * t + 1, z] = f_even
            if collect is not None:
                collect.append(PairCoding(z, t, f_odd, f_even, adjacency, lp, hp, mask))
        if header.frames % 2:
            out[n_out - 1, z] = _decode_frame(reader.read(TAG_UNPAIRED), header)
    if stats is not None:
        stats["read"] = dict(reader.read_bytes)
        stats["skipped"] = dict(reader.skipped_bytes)
    if out.size and (out.min() < 0 or out.max() > a_max):
        raise CorruptStreamError("decoded samples outside the declared bit depth")
    return Volume(out.astype(np.uint16), header.bit_depth)


def header_size() -> int:
    return _HEADER.size


def chunk_header_size() -> int:
    return _CHUNK.size
