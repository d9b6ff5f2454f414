"""Style fusion and style-primitive aggregation (forward pass only).

A speaker style is shifted by an affine style bias computed from the
speaker and audio-condition styles. The result drives a softmax attention
over ``e`` primitive (W_i, b_i) pairs whose convex combination is then
applied to every frame of the motion features.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, FormatError, MissingKey, NonFinite


def _arr(x, ndim, name):
    a = np.array(x, dtype=np.float64)
    if a.ndim != ndim:
        raise DimensionMismatch(f"{name}: expected {ndim}-D, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFinite(f"{name} contains NaN or Inf")
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class FusionParams:
    W_s: np.ndarray
    b_s: np.ndarray
    alpha: float = 0.1

    def __post_init__(self):
        W = _arr(self.W_s, 2, "W_s")
        b = _arr(self.b_s, 1, "b_s")
        if W.shape != (b.size, 2 * b.size):
            raise DimensionMismatch(f"W_s must be [{b.size}][{2 * b.size}], got {list(W.shape)}")
        object.__setattr__(self, "W_s", W)
        object.__setattr__(self, "b_s", b)
        object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def d_s(self) -> int:
        return self.b_s.size

    @classmethod
    def zeros(cls, d_s: int, alpha: float = 0.1) -> "FusionParams":
        return cls(np.zeros((d_s, 2 * d_s)), np.zeros(d_s), alpha)


@dataclass(frozen=True)
class PrimitiveBank:
    """``e`` style primitives plus the affine attention layer that weights them.

    weights has shape [e][d_m][d_m], biases [e][d_m], attn_W [e][d_s],
    attn_b [e].
    """

    weights: np.ndarray
    biases: np.ndarray
    attn_W: np.ndarray
    attn_b: np.ndarray

    def __post_init__(self):
        W = _arr(self.weights, 3, "primitive weights")
        b = _arr(self.biases, 2, "primitive biases")
        aW = _arr(self.attn_W, 2, "attn_W")
        ab = _arr(self.attn_b, 1, "attn_b")
        e = W.shape[0]
        if e < 1:
            raise DimensionMismatch("bank needs at least one primitive")
        if W.shape[1] != W.shape[2] or b.shape != (e, W.shape[1]):
            raise DimensionMismatch(
                f"primitives must be [e][d_m][d_m] and [e][d_m], got {W.shape} and {b.shape}"
            )
        if aW.shape[0] != e or ab.shape != (e,):
            raise DimensionMismatch(f"attention must be [{e}][d_s] and [{e}]")
        for name, val in (("weights", W), ("biases", b), ("attn_W", aW), ("attn_b", ab)):
            object.__setattr__(self, name, val)

    @property
    def e(self) -> int:
        return self.weights.shape[0]

    @property
    def d_m(self) -> int:
        return self.weights.shape[1]

    @property
    def d_s(self) -> int:
        return self.attn_W.shape[1]

    @classmethod
    def identity(cls, e: int, d_m: int, d_s: int) -> "PrimitiveBank":
        return cls(np.broadcast_to(np.eye(d_m), (e, d_m, d_m)), np.zeros((e, d_m)),
                   np.zeros((e, d_s)), np.zeros(e))


def fuse_style(S_r, S_a, params: FusionParams):
    """Return ``(S_g_hat, S_bias)`` with S_bias = W_s [S_r; S_a] + b_s and S_g_hat = S_r + alpha * S_bias."""
    S_r = _arr(S_r, 1, "S_r")
    S_a = _arr(S_a, 1, "S_a")
    if S_r.size != params.d_s or S_a.size != params.d_s:
        raise DimensionMismatch(
            f"styles must have d_s={params.d_s}, got {S_r.size} and {S_a.size}"
        )
    bias = params.W_s @ np.concatenate([S_r, S_a]) + params.b_s
    return S_r + params.alpha * bias, bias


def softmax(logits) -> np.ndarray:
    z = np.asarray(logits, dtype=np.float64)
    z = z - z.max()
    w = np.exp(z)
    return w / w.sum()


def primitive_attention(style, bank: PrimitiveBank) -> np.ndarray:
    s = _arr(style, 1, "style")
    if s.size != bank.d_s:
        raise DimensionMismatch(f"style has {s.size} dims, bank expects {bank.d_s}")
    return softmax(bank.attn_W @ s + bank.attn_b)


def aggregate_primitives(pi, bank: PrimitiveBank):
    pi = _arr(pi, 1, "pi")
    if pi.size != bank.e:
        raise DimensionMismatch(f"attention has {pi.size} entries, bank has {bank.e}")
    W = np.zeros((bank.d_m, bank.d_m))
    b = np.zeros(bank.d_m)
    for i in range(bank.e):
        W = W + pi[i] * bank.weights[i]
        b = b + pi[i] * bank.biases[i]
    return W, b


def infuse_style(Z, W, b) -> np.ndarray:
    Z = _arr(Z, 2, "Z")
    W = _arr(W, 2, "W")
    b = _arr(b, 1, "b")
    if W.shape != (b.size, Z.shape[1]):
        raise DimensionMismatch(f"W {W.shape} / b {b.shape} do not fit features of width {Z.shape[1]}")
    return Z @ W.T + b


def style_pipeline(S_r, S_a, params: FusionParams, bank: PrimitiveBank, Z) -> dict:
    """Fuse, attend, aggregate and infuse; returns every intermediate."""
    S_g, S_bias = fuse_style(S_r, S_a, params)
    pi = primitive_attention(S_g, bank)
    W, b = aggregate_primitives(pi, bank)
    return {"S_g": S_g, "S_bias": S_bias, "pi": pi, "Z_s": infuse_style(Z, W, b)}


# --- JSON -----------------------------------------------------------------


def _require(obj, keys, what):
    if not isinstance(obj, dict):
        raise FormatError(f"{what} must be a JSON object")
    for k in keys:
        if k not in obj:
            raise MissingKey(f"{what} is missing key {k!r}")


def _load_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: invalid JSON ({exc})") from exc


def params_from_dict(obj) -> FusionParams:
    _require(obj, ("d_s", "W_s", "b_s"), "style params")
    try:
        p = FusionParams(obj["W_s"], obj["b_s"], obj.get("alpha", 0.1))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, (DimensionMismatch, NonFinite)):
            raise
        raise FormatError(f"style params: {exc}") from exc
    if p.d_s != obj["d_s"]:
        raise DimensionMismatch(f"d_s={obj['d_s']} but b_s has {p.d_s} entries")
    return p


def bank_from_dict(obj) -> PrimitiveBank:
    _require(obj, ("d_s", "d_m", "e", "attn_W", "attn_b", "primitives"), "primitive bank")
    prims = obj["primitives"]
    if not isinstance(prims, list) or len(prims) != obj["e"]:
        raise FormatError(f"bank declares e={obj['e']} but lists {len(prims) if isinstance(prims, list) else '?'} primitives")
    for p in prims:
        _require(p, ("W", "b"), "primitive")
    try:
        bank = PrimitiveBank([p["W"] for p in prims], [p["b"] for p in prims],
                             obj["attn_W"], obj["attn_b"])
    except (TypeError, ValueError) as exc:
        if isinstance(exc, (DimensionMismatch, NonFinite)):
            raise
        raise FormatError(f"primitive bank: {exc}") from exc
    if bank.d_m != obj["d_m"] or bank.d_s != obj["d_s"]:
        raise DimensionMismatch(
            f"bank declares d_m={obj['d_m']}, d_s={obj['d_s']}; arrays give {bank.d_m}, {bank.d_s}"
        )
    return bank


def params_to_dict(p: FusionParams) -> dict:
    return {"d_s": p.d_s, "alpha": p.alpha, "W_s": p.W_s.tolist(), "b_s": p.b_s.tolist()}


def bank_to_dict(bank: PrimitiveBank) -> dict:
    return {
        "d_s": bank.d_s,
        "d_m": bank.d_m,
        "e": bank.e,
        "attn_W": bank.attn_W.tolist(),
        "attn_b": bank.attn_b.tolist(),
        "primitives": [{"W": W.tolist(), "b": b.tolist()} for W, b in zip(bank.weights, bank.biases)],
    }


def load_params(path: str | os.PathLike) -> FusionParams:
    return params_from_dict(_load_json(path))


def load_bank(path: str | os.PathLike) -> PrimitiveBank:
    return bank_from_dict(_load_json(path))
