"""Motion sequences, face templates and region masks, with their file formats.

FMOT v1 layout (all little-endian)::

    offset  size  field
    0       4     b"FMOT"
    4       4     u32 version (=1)
    8       4     u32 T (frames)
    12      4     u32 N (vertices)
    16      4     f32 fps
    20      12TN  f32 displacements, frame-major, then vertex, then x,y,z

FTPL v1 is ``b"FTPL"``, u32 version, u32 N, then N*3 f32 positions.
Values are stored as float32 and held in memory as float64.
"""

from __future__ import annotations

import json
import os
import struct
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    BadMagic,
    BadVersion,
    DimensionMismatch,
    Duplicate,
    FormatError,
    IndexOutOfRange,
    MissingKey,
    NonFinite,
    TruncatedFile,
    Unsorted,
    ZeroDims,
)

FMOT_MAGIC = b"FMOT"
FTPL_MAGIC = b"FTPL"
FORMAT_VERSION = 1

_FMOT_HEADER = struct.Struct("<4sIIIf")
_FTPL_HEADER = struct.Struct("<4sII")
_STORAGE = np.dtype("<f4")


def _frozen_array(values, ndim: int, name: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, order="C")
    if arr.ndim != ndim:
        raise DimensionMismatch(f"{name}: expected {ndim} dimensions, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFinite(f"{name} contains NaN or Inf")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class MotionSequence:
    """T frames of per-vertex 3D displacements (mm) over a neutral template."""

    frames: np.ndarray
    fps: float = 25.0

    def __post_init__(self):
        frames = _frozen_array(self.frames, 3, "frames")
        if frames.shape[2] != 3:
            raise DimensionMismatch(f"frames must be [T][N][3], got {frames.shape}")
        if frames.shape[0] < 1 or frames.shape[1] < 1:
            raise ZeroDims(f"T and N must be >= 1, got T={frames.shape[0]} N={frames.shape[1]}")
        fps = float(self.fps)
        if not np.isfinite(fps) or fps <= 0:
            raise FormatError(f"fps must be positive and finite, got {self.fps!r}")
        object.__setattr__(self, "frames", frames)
        object.__setattr__(self, "fps", fps)

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def n_vertices(self) -> int:
        return self.frames.shape[1]

    def with_frames(self, frames) -> "MotionSequence":
        return MotionSequence(frames, self.fps)


@dataclass(frozen=True)
class FaceTemplate:
    """Neutral-face vertex positions, [N][3] in mm."""

    vertices: np.ndarray

    def __post_init__(self):
        verts = _frozen_array(self.vertices, 2, "vertices")
        if verts.shape[1] != 3 or verts.shape[0] < 1:
            raise DimensionMismatch(f"vertices must be [N][3] with N >= 1, got {verts.shape}")
        object.__setattr__(self, "vertices", verts)

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]


@dataclass(frozen=True)
class RegionMask:
    lip: tuple = field(default_factory=tuple)
    upper: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "lip", tuple(int(i) for i in self.lip))
        object.__setattr__(self, "upper", tuple(int(i) for i in self.upper))
        for name in ("lip", "upper"):
            _check_index_list(getattr(self, name), name)

    def validate(self, n_vertices: int) -> "RegionMask":
        for name in ("lip", "upper"):
            idx = getattr(self, name)
            if idx and (idx[-1] >= n_vertices or idx[0] < 0):
                raise IndexOutOfRange(f"{name} index out of range for N={n_vertices}")
        return self


def _check_index_list(idx: Sequence[int], name: str) -> None:
    for a, b in zip(idx, idx[1:]):
        if a == b:
            raise Duplicate(f"{name}: duplicate index {a}")
        if a > b:
            raise Unsorted(f"{name}: indices not ascending ({a} before {b})")
    if idx and idx[0] < 0:
        raise IndexOutOfRange(f"{name}: negative index {idx[0]}")


def check_same_shape(a: MotionSequence, b: MotionSequence) -> None:
    if a.frames.shape != b.frames.shape:
        raise DimensionMismatch(
            f"sequence shapes differ: {a.frames.shape} vs {b.frames.shape}"
        )


# --- FMOT -----------------------------------------------------------------


def encode_fmot(seq: MotionSequence) -> bytes:
    frames = np.asarray(seq.frames)
    if not np.all(np.isfinite(frames)):
        raise NonFinite("refusing to write NaN/Inf")
    T, N, _ = frames.shape
    header = _FMOT_HEADER.pack(FMOT_MAGIC, FORMAT_VERSION, T, N, seq.fps)
    with np.errstate(over="ignore"):
        payload = frames.astype(_STORAGE)
    if not np.all(np.isfinite(payload)):
        raise NonFinite("values overflow float32 storage")
    return header + payload.tobytes(order="C")


def decode_fmot(data: bytes) -> MotionSequence:
    if len(data) < 4 or data[:4] != FMOT_MAGIC:
        raise BadMagic(f"expected magic {FMOT_MAGIC!r}, got {bytes(data[:4])!r}")
    if len(data) < _FMOT_HEADER.size:
        raise TruncatedFile(f"header needs {_FMOT_HEADER.size} bytes, got {len(data)}")
    _, version, T, N, fps = _FMOT_HEADER.unpack_from(data)
    if version != FORMAT_VERSION:
        raise BadVersion(f"unsupported FMOT version {version}")
    if T == 0 or N == 0:
        raise ZeroDims(f"T={T} N={N}")
    expected = _FMOT_HEADER.size + T * N * 3 * _STORAGE.itemsize
    if len(data) < expected:
        raise TruncatedFile(f"expected {expected} bytes for T={T} N={N}, got {len(data)}")
    if len(data) > expected:
        raise FormatError(f"{len(data) - expected} trailing bytes after payload")
    payload = np.frombuffer(data, dtype=_STORAGE, count=T * N * 3, offset=_FMOT_HEADER.size)
    if not np.all(np.isfinite(payload)):
        raise NonFinite("payload contains NaN or Inf")
    if not (np.isfinite(fps) and fps > 0):
        raise FormatError(f"invalid fps {fps}")
    return MotionSequence(payload.astype(np.float64).reshape(T, N, 3), fps)


def write_fmot(seq: MotionSequence, path: str | os.PathLike) -> None:
    data = encode_fmot(seq)
    with open(path, "wb") as fh:
        fh.write(data)


def read_fmot(path: str | os.PathLike) -> MotionSequence:
    with open(path, "rb") as fh:
        return decode_fmot(fh.read())


# --- FTPL -----------------------------------------------------------------


def write_ftpl(template: FaceTemplate, path: str | os.PathLike) -> None:
    verts = template.vertices.astype(_STORAGE)
    with open(path, "wb") as fh:
        fh.write(_FTPL_HEADER.pack(FTPL_MAGIC, FORMAT_VERSION, verts.shape[0]))
        fh.write(verts.tobytes(order="C"))


def read_ftpl(path: str | os.PathLike) -> FaceTemplate:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != FTPL_MAGIC:
        raise BadMagic(f"expected magic {FTPL_MAGIC!r}, got {data[:4]!r}")
    if len(data) < _FTPL_HEADER.size:
        raise TruncatedFile("FTPL header truncated")
    _, version, N = _FTPL_HEADER.unpack_from(data)
    if version != FORMAT_VERSION:
        raise BadVersion(f"unsupported FTPL version {version}")
    if N == 0:
        raise ZeroDims("template has no vertices")
    expected = _FTPL_HEADER.size + N * 3 * _STORAGE.itemsize
    if len(data) < expected:
        raise TruncatedFile(f"expected {expected} bytes, got {len(data)}")
    if len(data) > expected:
        raise FormatError(f"{len(data) - expected} trailing bytes after payload")
    verts = np.frombuffer(data, dtype=_STORAGE, count=N * 3, offset=_FTPL_HEADER.size)
    if not np.all(np.isfinite(verts)):
        raise NonFinite("template contains NaN or Inf")
    return FaceTemplate(verts.astype(np.float64).reshape(N, 3))


# --- masks ----------------------------------------------------------------


def parse_mask(obj, n_vertices: int) -> RegionMask:
    if not isinstance(obj, dict):
        raise FormatError("mask must be a JSON object")
    parts = {}
    for key in ("lip", "upper"):
        if key not in obj:
            raise MissingKey(f"mask is missing key {key!r}")
        values = obj[key]
        if not isinstance(values, list) or not all(
            isinstance(v, int) and not isinstance(v, bool) for v in values
        ):
            raise FormatError(f"mask[{key!r}] must be a list of integers")
        for v in values:
            if v < 0 or v >= n_vertices:
                raise IndexOutOfRange(f"mask[{key!r}] index {v} out of range for N={n_vertices}")
        parts[key] = values
    return RegionMask(parts["lip"], parts["upper"])


def read_mask(path: str | os.PathLike, n_vertices: int) -> RegionMask:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"mask is not valid JSON: {exc}") from exc
    return parse_mask(obj, n_vertices)


def write_mask(mask: RegionMask, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"lip": list(mask.lip), "upper": list(mask.upper)}, fh)
