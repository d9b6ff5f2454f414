"""Style features of motion sequences.

Per-vertex dynamics deviation, truncated DFT magnitude matrices, composite
temporal statistics and lip-distance traces. Standard deviations are
population (divide by the number of samples) throughout.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, FormatError, IndexOutOfRange, TooShort
from .motion import FaceTemplate, MotionSequence

DEFAULT_BINS = 20
AXES = ("x", "y", "z")


@dataclass(frozen=True)
class SpectralConfig:
    bins: int = DEFAULT_BINS

    def __post_init__(self):
        if int(self.bins) < 1:
            raise ValueError(f"bins must be >= 1, got {self.bins}")
        object.__setattr__(self, "bins", int(self.bins))


def retained_bins(n_frames: int, bins: int = DEFAULT_BINS) -> int:
    """Number of kept DFT bins: the lowest ``bins`` frequencies, DC included."""
    return min(bins, n_frames // 2 + 1)


def _vertex_norms(frames: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(frames * frames, axis=-1))


def dyn(seq: MotionSequence, vertex: int) -> float:
    """Std over time of the per-frame Euclidean norm of one vertex's displacement."""
    if not 0 <= vertex < seq.n_vertices:
        raise IndexOutOfRange(f"vertex {vertex} out of range for N={seq.n_vertices}")
    return float(np.std(np.ascontiguousarray(_vertex_norms(seq.frames[:, vertex, :]))))


def std_vector(seq: MotionSequence) -> np.ndarray:
    """:func:`dyn` for every vertex, shape [N]."""
    # reduce contiguous per-vertex rows so results match dyn() bit for bit
    return np.std(np.ascontiguousarray(_vertex_norms(seq.frames).T), axis=1)


def frequency_matrix(seq: MotionSequence, cfg: SpectralConfig | None = None) -> np.ndarray:
    """DFT magnitudes per channel, shape [3N][m], normalized by 1/T.

    Channel ``3*v + c`` is axis ``c`` of vertex ``v``. Row entries are
    ``|X_k| / T`` for the lowest ``m = min(bins, T//2 + 1)`` bins.
    """
    cfg = cfg or SpectralConfig()
    T = seq.n_frames
    if T < 2:
        raise TooShort(f"frequency_matrix needs T >= 2, got {T}")
    m = retained_bins(T, cfg.bins)
    channels = seq.frames.reshape(T, -1)
    spectrum = np.fft.rfft(channels, axis=0)[:m]
    return np.ascontiguousarray((np.abs(spectrum) / T).T)


def composite_stats(features, mode: str = "mean") -> np.ndarray:
    """Concatenate [aggregate; std; first-difference std] over time.

    ``features`` is a [T][d] time series; the aggregate is the temporal
    mean or, with ``mode="max"``, the temporal maximum.
    """
    x = np.asarray(features, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise DimensionMismatch(f"features must be [T][d], got shape {x.shape}")
    if x.shape[0] < 2:
        raise TooShort("composite_stats needs at least 2 frames")
    if mode == "mean":
        agg = x.mean(axis=0)
    elif mode == "max":
        agg = x.max(axis=0)
    else:
        raise ValueError(f"mode must be 'mean' or 'max', got {mode!r}")
    return np.concatenate([agg, x.std(axis=0), np.diff(x, axis=0).std(axis=0)])


def lip_distance_trace(seq: MotionSequence, template: FaceTemplate,
                       upper_lip: int, lower_lip: int) -> np.ndarray:
    if template.n_vertices != seq.n_vertices:
        raise DimensionMismatch(
            f"template has {template.n_vertices} vertices, sequence has {seq.n_vertices}"
        )
    for idx in (upper_lip, lower_lip):
        if not 0 <= idx < seq.n_vertices:
            raise IndexOutOfRange(f"lip vertex {idx} out of range for N={seq.n_vertices}")
    upper = template.vertices[upper_lip] + seq.frames[:, upper_lip]
    lower = template.vertices[lower_lip] + seq.frames[:, lower_lip]
    return np.linalg.norm(upper - lower, axis=1)


# --- CSV export -----------------------------------------------------------


def channel_labels(n_vertices: int) -> list[str]:
    return [f"v{v}_{a}" for v in range(n_vertices) for a in AXES]


def feature_table(seq: MotionSequence, kind: str, bins: int = DEFAULT_BINS):
    """Header and rows for the feature CSV of one sequence.

    kind is one of ``std``, ``freq``, ``composite-mean``, ``composite-max``.
    Composite rows treat every displacement channel as a 1-D series.
    """
    if kind == "std":
        values = std_vector(seq)
        return ["vertex", "std"], [[f"v{v}", x] for v, x in enumerate(values)]
    if kind == "freq":
        fm = frequency_matrix(seq, SpectralConfig(bins))
        header = ["channel"] + [f"bin_{k}" for k in range(fm.shape[1])]
        return header, [[lab, *row] for lab, row in zip(channel_labels(seq.n_vertices), fm)]
    if kind in ("composite-mean", "composite-max"):
        mode = kind.split("-", 1)[1]
        d = seq.n_vertices * 3
        stats = composite_stats(seq.frames.reshape(seq.n_frames, d), mode).reshape(3, d)
        header = ["channel", mode, "std", "diff_std"]
        return header, [[lab, *stats[:, i]] for i, lab in enumerate(channel_labels(seq.n_vertices))]
    raise ValueError(f"unknown feature kind {kind!r}")


def write_feature_csv(header, rows, path: str | os.PathLike) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([x if isinstance(x, str) else format(float(x), ".17g") for x in row])


def read_matrix_csv(path: str | os.PathLike) -> np.ndarray:
    """Read a numeric [rows][cols] CSV, skipping a non-numeric header row."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if rows:
        try:
            [float(x) for x in rows[0]]
        except ValueError:
            rows = rows[1:]
    try:
        arr = np.array([[float(x) for x in r] for r in rows], dtype=np.float64)
    except ValueError as exc:
        raise FormatError(f"{path}: non-numeric CSV entry ({exc})") from exc
    if arr.ndim != 2 or arr.size == 0:
        raise FormatError(f"{path}: expected a non-empty rectangular matrix")
    return arr
