"""Training losses with analytic gradients.

Reconstruction, style-consistency, multi-order trend, and windowed
audio/motion contrastive loss, plus their weighted total. Losses that act
on predicted motion return ``(value, grad)`` so they can be checked against
finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NonFinite, OrderTooLarge, ZeroNorm
from .motion import MotionSequence, check_same_shape

NORM_FLOOR = 1e-12


@dataclass(frozen=True)
class TrendConfig:
    max_order: int = 5

    def __post_init__(self):
        if int(self.max_order) < 1:
            raise ValueError("max_order must be >= 1")


@dataclass(frozen=True)
class ContrastiveConfig:
    temperature: float = 0.1
    window: int = 5
    direction_weight: float = 0.5

    def __post_init__(self):
        if not self.temperature > 0:
            raise ValueError("temperature must be positive")
        if int(self.window) < 0:
            raise ValueError("window must be >= 0")
        if not 0.0 <= self.direction_weight <= 1.0:
            raise ValueError("direction_weight must lie in [0, 1]")


@dataclass(frozen=True)
class LossWeights:
    rec: float = 1.0
    s: float = 0.001
    tre: float = 1.0
    lcon: float = 0.001

    def __post_init__(self):
        for name in ("rec", "s", "tre", "lcon"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"weight {name} must be >= 0")


def _frames(x) -> np.ndarray:
    return x.frames if isinstance(x, MotionSequence) else np.asarray(x, dtype=np.float64)


def _same_shape(pred, gt):
    if isinstance(pred, MotionSequence) and isinstance(gt, MotionSequence):
        check_same_shape(pred, gt)
    p, g = _frames(pred), _frames(gt)
    if p.shape != g.shape:
        raise DimensionMismatch(f"shapes differ: {p.shape} vs {g.shape}")
    return p, g


def rec_loss(pred, gt):
    """Sum over frames of the squared Frobenius error; gradient w.r.t. pred."""
    p, g = _same_shape(pred, gt)
    d = p - g
    return float(np.sum(d * d)), 2.0 * d


def style_loss(pred_style, gt_style, speaker_style, mean_style) -> float:
    vecs = [np.asarray(v, dtype=np.float64).ravel()
            for v in (pred_style, gt_style, speaker_style, mean_style)]
    if len({v.shape for v in vecs}) != 1:
        raise DimensionMismatch(f"style vector sizes differ: {[v.size for v in vecs]}")
    a = vecs[0] - vecs[1]
    b = vecs[2] - vecs[3]
    return float(a @ a + b @ b)


def trend_loss(pred, gt, cfg: TrendConfig | None = None):
    """Squared mismatch of r-frame differences for r = 1..R, averaged over R."""
    cfg = cfg or TrendConfig()
    p, g = _same_shape(pred, gt)
    T = p.shape[0]
    R = int(cfg.max_order)
    if R >= T:
        raise OrderTooLarge(f"max order {R} must be < T={T}")
    d = p - g
    value = 0.0
    grad = np.zeros_like(d)
    for r in range(1, R + 1):
        res = d[r:] - d[:-r]
        value += float(np.sum(res * res))
        grad[r:] += 2.0 * res
        grad[:-r] -= 2.0 * res
    return value / R, grad / R


def _unit_rows(x, what):
    norms = np.linalg.norm(x, axis=1)
    bad = np.flatnonzero(norms < NORM_FLOOR)
    if bad.size:
        raise ZeroNorm(f"{what} vector at t={int(bad[0])} has norm below {NORM_FLOOR}")
    return x / norms[:, None], norms


def _log_softmax_rows(logits, allowed):
    masked = np.where(allowed, logits, -np.inf)
    top = masked.max(axis=1, keepdims=True)
    shifted = masked - top
    lse = np.log(np.sum(np.exp(shifted), axis=1, keepdims=True))
    return np.where(allowed, shifted - lse, -np.inf)


def local_contrastive_loss(audio, motion, W_l, cfg: ContrastiveConfig | None = None):
    """Windowed two-direction contrastive loss between audio and projected motion.

    Parameters
    ----------
    audio : array [T][d_a]
    motion : array [T][d_m]
        Style-infused motion features, projected into audio space by ``W_l``.
    W_l : array [d_a][d_m]

    Returns
    -------
    value, grad_W, grad_Z
        The l1 term uses sign(0) = 0 as its subgradient.
    """
    cfg = cfg or ContrastiveConfig()
    A = np.asarray(audio, dtype=np.float64)
    Z = np.asarray(motion, dtype=np.float64)
    W = np.asarray(W_l, dtype=np.float64)
    if A.ndim != 2 or Z.ndim != 2 or W.ndim != 2:
        raise DimensionMismatch("audio, motion and W_l must all be 2-D")
    T = A.shape[0]
    if Z.shape[0] != T or T < 1:
        raise DimensionMismatch(f"audio has {A.shape[0]} frames, motion has {Z.shape[0]}")
    if W.shape != (A.shape[1], Z.shape[1]):
        raise DimensionMismatch(f"W_l must be {(A.shape[1], Z.shape[1])}, got {W.shape}")

    P = Z @ W.T
    A_hat, _ = _unit_rows(A, "audio")
    P_hat, p_norm = _unit_rows(P, "projected motion")
    cos = A_hat @ P_hat.T  # cos[i, j] = <a_i, W z_j>
    S = cos / cfg.temperature
    idx = np.arange(T)
    allowed = np.abs(idx[:, None] - idx[None, :]) <= int(cfg.window)
    lam = cfg.direction_weight

    # audio -> motion: row t, softmax over motion frames j
    ls_am = _log_softmax_rows(S, allowed)
    # motion -> audio: column t, softmax over audio frames i
    ls_ma = _log_softmax_rows(S.T, allowed)
    loss_am = -np.diag(ls_am)
    loss_ma = -np.diag(ls_ma)
    l1 = float(np.sum(np.abs(W)))
    value = float(np.sum(lam * loss_am + (1.0 - lam) * loss_ma) / T) + l1

    eye = np.eye(T)
    prob_am = np.where(allowed, np.exp(ls_am), 0.0)
    prob_ma = np.where(allowed, np.exp(ls_ma), 0.0)
    G = (lam * (prob_am - eye) + (1.0 - lam) * (prob_ma - eye).T) / T  # dL/dS
    Gc = G / cfg.temperature  # dL/dcos
    # d cos[i,j] / d p_j = (a_hat_i - cos[i,j] p_hat_j) / |p_j|
    grad_P = (Gc.T @ A_hat - np.sum(Gc * cos, axis=0)[:, None] * P_hat) / p_norm[:, None]
    grad_Z = grad_P @ W
    grad_W = grad_P.T @ Z + np.sign(W)
    return value, grad_W, grad_Z


def total_loss(parts: dict, weights: LossWeights | None = None) -> float:
    """Weighted sum of the four loss terms; missing parts count as zero."""
    weights = weights or LossWeights()
    total = 0.0
    for name in ("rec", "s", "tre", "lcon"):
        v = float(parts.get(name, 0.0))
        if not math.isfinite(v):
            raise NonFinite(f"loss part {name} is not finite")
        total += getattr(weights, name) * v
    return total
