"""Evaluation metrics for predicted vs ground-truth motion: LVE, FVE, FDTW, FDD, FFE.

LVE and FVE use squared per-vertex Euclidean errors. FDD is the signed mean
of dynamics differences over the upper face, so positive and negative
per-vertex deviations cancel; FFE compares truncated DFT magnitudes and
does not have that blind spot.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DimensionMismatch, EmptyRegion, TooShort
from .features import SpectralConfig, frequency_matrix, std_vector
from .motion import MotionSequence, RegionMask, check_same_shape

METRIC_NAMES = ("lve", "fve", "fdtw", "fdd", "ffe")


def _sq_errors(pred: MotionSequence, gt: MotionSequence) -> np.ndarray:
    check_same_shape(pred, gt)
    d = pred.frames - gt.frames
    return np.sum(d * d, axis=-1)


def lve(pred: MotionSequence, gt: MotionSequence, mask: RegionMask) -> float:
    """Frame-averaged maximum squared error over the lip vertices."""
    if not mask.lip:
        raise EmptyRegion("lip region is empty")
    mask.validate(gt.n_vertices)
    err = _sq_errors(pred, gt)
    return float(np.mean(np.max(err[:, list(mask.lip)], axis=1)))


def fve(pred: MotionSequence, gt: MotionSequence) -> float:
    """Mean squared per-vertex error over all frames and vertices."""
    return float(np.mean(_sq_errors(pred, gt)))


def fdtw(pred: MotionSequence, gt: MotionSequence) -> float:
    """DTW over frames, normalized by T_pred + T_gt.

    Local cost is the mean per-vertex Euclidean distance between two frames;
    steps are (i-1, j), (i, j-1), (i-1, j-1), anchored at both ends.
    """
    if pred.n_vertices != gt.n_vertices:
        raise DimensionMismatch(f"N differs: {pred.n_vertices} vs {gt.n_vertices}")
    total = kernels.dtw_cost(pred.frames, gt.frames)
    return total / (pred.n_frames + gt.n_frames)


def fdd(pred: MotionSequence, gt: MotionSequence, mask: RegionMask) -> float:
    if not mask.upper:
        raise EmptyRegion("upper-face region is empty")
    mask.validate(gt.n_vertices)
    check_same_shape(pred, gt)
    idx = list(mask.upper)
    diff = std_vector(gt)[idx] - std_vector(pred)[idx]
    return float(np.sum(diff) / len(idx))


def ffe(pred: MotionSequence, gt: MotionSequence, cfg: SpectralConfig | None = None) -> float:
    """Mean over the 3N channels of the squared L2 gap between DFT magnitude rows."""
    check_same_shape(pred, gt)
    if gt.n_frames < 2:
        raise TooShort(f"ffe needs T >= 2, got {gt.n_frames}")
    d = frequency_matrix(gt, cfg) - frequency_matrix(pred, cfg)
    return float(np.sum(d * d) / d.shape[0])


def compute_metrics(pred: MotionSequence, gt: MotionSequence, mask: RegionMask | None,
                    names=METRIC_NAMES, cfg: SpectralConfig | None = None) -> dict:
    """Selected metrics for one pair, in canonical order."""
    out = {}
    for name in METRIC_NAMES:
        if name not in names:
            continue
        if name == "lve":
            out[name] = lve(pred, gt, _need_mask(mask))
        elif name == "fve":
            out[name] = fve(pred, gt)
        elif name == "fdtw":
            out[name] = fdtw(pred, gt)
        elif name == "fdd":
            out[name] = fdd(pred, gt, _need_mask(mask))
        else:
            out[name] = ffe(pred, gt, cfg)
    return out


def _need_mask(mask):
    if mask is None:
        raise EmptyRegion("this metric needs a region mask")
    return mask


@dataclass
class MetricsReport:
    metrics: tuple = METRIC_NAMES
    sequences: list = field(default_factory=list)

    def add(self, seq_id: str, values: dict) -> None:
        for k, v in values.items():
            if k not in METRIC_NAMES:
                raise KeyError(f"unknown metric {k!r}")
            if not np.isfinite(v):
                raise ValueError(f"metric {k} for {seq_id} is not finite")
        self.sequences.append((seq_id, values))

    def mean(self) -> dict:
        if not self.sequences:
            return {}
        return {
            name: float(np.mean([vals[name] for _, vals in self.sequences]))
            for name in METRIC_NAMES
            if name in self.metrics
        }

    def to_dict(self) -> dict:
        seqs = []
        for seq_id, vals in self.sequences:
            row = {"id": seq_id}
            row.update((n, vals[n]) for n in METRIC_NAMES if n in vals)
            seqs.append(row)
        return {"sequences": seqs, "mean": self.mean()}


def evaluate_pairs(pairs, mask: RegionMask | None, names=METRIC_NAMES,
                   cfg: SpectralConfig | None = None, threads: int = 1) -> MetricsReport:
    """Evaluate (id, pred, gt) triples; the report keeps input order for any thread count."""
    names = tuple(n for n in METRIC_NAMES if n in names)
    pairs = list(pairs)

    def one(item):
        seq_id, pred, gt = item
        return seq_id, compute_metrics(pred, gt, mask, names, cfg)

    if threads > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, pairs))
    else:
        results = [one(p) for p in pairs]
    report = MetricsReport(metrics=names)
    for seq_id, vals in results:
        report.add(seq_id, vals)
    return report
