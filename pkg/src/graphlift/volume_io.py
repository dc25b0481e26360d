"""Raw integer volumes, temporal sequences and synthetic phantoms.

On-disk layout: ``<name>`` holds little-endian unsigned 16-bit samples,
x fastest, then y, z, t.  ``<name>.hdr`` is a plain ``key = value`` text
sidecar::

    width = 64
    height = 48
    slices = 1
    frames = 6
    bit_depth = 12
    sample_order = x,y,z,t
    sample_format = uint16le

In memory a volume is an array of shape ``(T, Z, Y, X)``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

SAMPLE_ORDER = "x,y,z,t"
SAMPLE_FORMAT = "uint16le"
MIN_PHANTOM_SIZE = 8


class VolumeFormatError(ValueError):
    """Raised for malformed or inconsistent raw volumes."""


@dataclass(frozen=True)
class VolumeHeader:
    width: int
    height: int
    slices: int
    frames: int
    bit_depth: int

    def __post_init__(self):
        for name in ("width", "height", "slices", "frames"):
            if getattr(self, name) < 1:
                raise VolumeFormatError(f"{name} must be >= 1")
        if not 1 <= self.bit_depth <= 16:
            raise VolumeFormatError(f"bit_depth {self.bit_depth} outside 1..16")

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return (self.frames, self.slices, self.height, self.width)

    @property
    def n_samples(self) -> int:
        return self.width * self.height * self.slices * self.frames

    def to_text(self) -> str:
        return (
            f"width = {self.width}\n"
            f"height = {self.height}\n"
            f"slices = {self.slices}\n"
            f"frames = {self.frames}\n"
            f"bit_depth = {self.bit_depth}\n"
            f"sample_order = {SAMPLE_ORDER}\n"
            f"sample_format = {SAMPLE_FORMAT}\n"
        )

    @classmethod
    def from_text(cls, text: str) -> "VolumeHeader":
        fields = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise VolumeFormatError(f"header line {lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            fields[key] = value
        try:
            ints = {k: int(fields[k]) for k in ("width", "height", "slices", "frames", "bit_depth")}
        except KeyError as exc:
            raise VolumeFormatError(f"header missing key {exc.args[0]!r}") from None
        except ValueError as exc:
            raise VolumeFormatError(f"non-integer header value: {exc}") from None
        if fields.get("sample_order", SAMPLE_ORDER).replace(" ", "") != SAMPLE_ORDER:
            raise VolumeFormatError(f"unsupported sample_order {fields['sample_order']!r}")
        if fields.get("sample_format", SAMPLE_FORMAT) != SAMPLE_FORMAT:
            raise VolumeFormatError(f"unsupported sample_format {fields['sample_format']!r}")
        return cls(**ints)


@dataclass
class Volume:
    """A dynamic volume: ``samples[t, z, y, x]`` with a declared bit depth."""

    samples: np.ndarray
    bit_depth: int = 12

    def __post_init__(self):
        s = np.asarray(self.samples)
        if s.ndim != 4:
            raise VolumeFormatError(f"expected 4-D (T, Z, Y, X) samples, got shape {s.shape}")
        if not 1 <= self.bit_depth <= 16:
            raise VolumeFormatError(f"bit_depth {self.bit_depth} outside 1..16")
        if s.size and (s.min() < 0 or s.max() >= (1 << self.bit_depth)):
            raise VolumeFormatError(f"samples exceed the {self.bit_depth}-bit range")
        self.samples = s.astype(np.uint16, copy=False)

    @property
    def header(self) -> VolumeHeader:
        t, z, y, x = self.samples.shape
        return VolumeHeader(width=x, height=y, slices=z, frames=t, bit_depth=self.bit_depth)

    @classmethod
    def from_sequence(cls, frames: np.ndarray, bit_depth: int = 12) -> "Volume":
        """Wrap a ``(T, Y, X)`` temporal sequence as a single-slice volume."""
        frames = np.asarray(frames)
        return cls(frames[:, None, :, :], bit_depth)


def header_path(path) -> str:
    return os.fspath(path) + ".hdr"


def save_volume(volume: Volume, path) -> None:
    with open(header_path(path), "w", encoding="ascii") as fh:
        fh.write(volume.header.to_text())
    volume.samples.astype("<u2").tofile(os.fspath(path))


def load_volume(path) -> Volume:
    try:
        with open(header_path(path), encoding="ascii") as fh:
            header = VolumeHeader.from_text(fh.read())
        raw = np.fromfile(os.fspath(path), dtype="<u2")
    except OSError as exc:
        raise VolumeFormatError(f"cannot read volume {os.fspath(path)!r}: {exc}") from exc
    if os.path.getsize(path) != 2 * header.n_samples:
        raise VolumeFormatError(
            f"size mismatch: header declares {header.n_samples} samples, "
            f"payload holds {os.path.getsize(path) / 2:g}"
        )
    return Volume(raw.reshape(header.shape).astype(np.uint16), header.bit_depth)


def extract_temporal_sequence(volume: Volume, z: int) -> np.ndarray:
    """Frames ``f_1..f_T`` of slice ``z`` as a ``(T, Y, X)`` array."""
    n_slices = volume.samples.shape[1]
    if not 0 <= z < n_slices:
        raise IndexError(f"slice {z} out of range 0..{n_slices - 1}")
    return volume.samples[:, z]


@dataclass
class Structure:
    """A bright object in a phantom.

    ``kind`` is ``"rect"`` or ``"disk"``.  Position is the top-left corner
    (rect) or the centre (disk) at frame 0; it moves by ``velocity`` pixels
    per frame and its half-extent grows by ``growth`` per frame.
    ``textured`` adds a pattern in ``[0, 996]`` that travels with the object, so
    the true motion is the unique exact match.
    """

    kind: str = "rect"
    position: tuple[int, int] = (8, 8)
    size: tuple[int, int] = (8, 8)
    intensity: int = 2000
    velocity: tuple[int, int] = (0, 0)
    growth: tuple[int, int] = (0, 0)
    textured: bool = False


@dataclass
class MotionSpec:
    structures: list[Structure] = field(default_factory=list)
    background: int = 600
    background_texture: int = 200
    noise_sigma: float = 0.0


def _texture(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    # 37 du + 101 dv is never a nonzero multiple of 997 for |du|, |dv| <= 6,
    # so no two pixels of a 7x7 window share a value.
    return (37 * u + 101 * v) % 997


def generate_phantom(
    width: int,
    height: int,
    frames: int,
    bit_depth: int = 12,
    motion_spec: MotionSpec | None = None,
    noise_seed: int = 0,
) -> np.ndarray:
    """Deterministic synthetic ``(T, Y, X)`` sequence of moving structures."""
    if width < MIN_PHANTOM_SIZE or height < MIN_PHANTOM_SIZE:
        raise ValueError(f"phantom must be at least {MIN_PHANTOM_SIZE}x{MIN_PHANTOM_SIZE}")
    if frames < 1:
        raise ValueError("frames must be >= 1")
    spec = motion_spec if motion_spec is not None else MotionSpec()
    a_max = (1 << bit_depth) - 1
    yy, xx = np.mgrid[0:height, 0:width]

    # smooth static background
    base = spec.background + spec.background_texture * (
        0.5 + 0.25 * np.sin(2 * np.pi * xx / max(width, 8) * 1.5)
        + 0.25 * np.cos(2 * np.pi * yy / max(height, 8) * 1.25)
    )
    base = np.rint(base).astype(np.int64)

    rng = np.random.default_rng(noise_seed)
    out = np.empty((frames, height, width), dtype=np.int64)
    for t in range(frames):
        f = base.copy()
        for s in spec.structures:
            px = s.position[0] + s.velocity[0] * t
            py = s.position[1] + s.velocity[1] * t
            gx = s.growth[0] * t
            gy = s.growth[1] * t
            if s.kind == "rect":
                x0, y0 = px - gx, py - gy
                w, h = s.size[0] + 2 * gx, s.size[1] + 2 * gy
                inside = (xx >= x0) & (xx < x0 + w) & (yy >= y0) & (yy < y0 + h)
                u, v = xx - px, yy - py
            elif s.kind == "disk":
                rx, ry = s.size[0] / 2 + gx, s.size[1] / 2 + gy
                inside = ((xx - px) / rx) ** 2 + ((yy - py) / ry) ** 2 <= 1.0
                u, v = xx - px, yy - py
            else:
                raise ValueError(f"unknown structure kind {s.kind!r}")
            val = np.full((height, width), s.intensity, dtype=np.int64)
            if s.textured:
                val = val + _texture(u, v)
            f[inside] = val[inside]
        if spec.noise_sigma > 0:
            f = f + np.rint(rng.normal(0.0, spec.noise_sigma, size=f.shape)).astype(np.int64)
        out[t] = np.clip(f, 0, a_max)
    return out.astype(np.uint16)


def translating_phantom(
    width: int = 64,
    height: int = 64,
    frames: int = 4,
    velocity: tuple[int, int] = (1, 0),
    noise_sigma: float = 0.0,
    seed: int = 0,
    bit_depth: int = 12,
) -> np.ndarray:
    """Textured rectangle plus disk translating over a static background."""
    spec = MotionSpec(
        structures=[
            Structure("rect", (width // 4, height // 4), (width // 3, height // 3),
                      intensity=2400, velocity=velocity, textured=True),
            Structure("disk", (2 * width // 3, 2 * height // 3), (width // 5, height // 5),
                      intensity=3000, velocity=(-velocity[1], velocity[0]), textured=True),
        ],
        noise_sigma=noise_sigma,
    )
    return generate_phantom(width, height, frames, bit_depth, spec, seed)
