"""Deterministic synthetic multi-speaker corpus and the style-discriminability experiment.

Every sequence is a sum of per-channel sinusoids at the speaker's base
frequency bins plus Gaussian noise. All randomness comes from a single
SplitMix64 stream seeded by the corpus seed. Draw order, which is part of
the format:

    for each profile (in order):
      for each sequence j:
        N*3*B phase uniforms, row-major [v][c][b]; phase = 2*pi*u
        T*N*3 standard normals, row-major [t][v][c] (Box-Muller pairs:
          u1 = 1 - U, u2 = U; cos value then sin value; a trailing odd
          sin value is discarded)

Uniforms are ``(x >> 11) * 2**-53`` of the 64-bit SplitMix64 output. A
sample is ``sum_b A[v][c][b] * sin(2*pi*f_b*t/T + phase) + sigma * z``.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .errors import ConfigMismatch, DimensionMismatch, FormatError, MissingKey, TooFewSamples
from .features import DEFAULT_BINS, SpectralConfig, frequency_matrix, std_vector
from .motion import MotionSequence, read_fmot, write_fmot

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64_next(state: int) -> tuple[int, int]:
    """One SplitMix64 step: returns ``(value, next_state)``."""
    state = (state + GOLDEN_GAMMA) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31), state


class SplitMix64:
    """Stateful stream over the kernel backends."""

    def __init__(self, seed: int):
        if not 0 <= int(seed) <= MASK64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.state = int(seed)

    def next(self) -> int:
        value, self.state = splitmix64_next(self.state)
        return value

    def uniforms(self, n: int) -> np.ndarray:
        out, self.state = kernels.uniforms(self.state, n)
        return out

    def normals(self, n: int) -> np.ndarray:
        out, self.state = kernels.normals(self.state, n)
        return out


@dataclass(frozen=True)
class SpeakerProfile:
    id: str
    base_bins: tuple
    amplitudes: np.ndarray  # [N][3][B]
    noise_sigma: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "base_bins", tuple(int(b) for b in self.base_bins))
        amps = np.array(self.amplitudes, dtype=np.float64)
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "noise_sigma", float(self.noise_sigma))
        if not self.base_bins:
            raise ConfigMismatch(f"profile {self.id}: needs at least one base bin")
        if len(set(self.base_bins)) != len(self.base_bins):
            raise ConfigMismatch(f"profile {self.id}: base bins must be distinct")
        if amps.ndim != 3 or amps.shape[1:] != (3, len(self.base_bins)):
            raise ConfigMismatch(
                f"profile {self.id}: amplitudes must be [N][3][{len(self.base_bins)}], got {amps.shape}"
            )
        if not np.all(np.isfinite(amps)):
            raise ConfigMismatch(f"profile {self.id}: non-finite amplitude")
        if not self.noise_sigma >= 0:
            raise ConfigMismatch(f"profile {self.id}: noise_sigma must be >= 0")


@dataclass(frozen=True)
class CorpusConfig:
    speakers: int
    sequences_per_speaker: int
    T: int
    N: int
    seed: int
    fps: float = 25.0

    def __post_init__(self):
        if min(self.speakers, self.sequences_per_speaker, self.N) < 1:
            raise ConfigMismatch("speaker, sequence and vertex counts must be >= 1")
        if self.T < 4:
            raise ConfigMismatch(f"T must be >= 4, got {self.T}")
        if not 0 <= self.seed <= MASK64:
            raise ConfigMismatch("seed must fit in 64 unsigned bits")


def _check_profiles(cfg: CorpusConfig, profiles) -> None:
    if len(profiles) != cfg.speakers:
        raise ConfigMismatch(f"config has {cfg.speakers} speakers, got {len(profiles)} profiles")
    for p in profiles:
        if p.amplitudes.shape[0] != cfg.N:
            raise ConfigMismatch(f"profile {p.id}: amplitudes cover {p.amplitudes.shape[0]} vertices, N={cfg.N}")
        for b in p.base_bins:
            if not 1 <= b < cfg.T // 2:
                raise ConfigMismatch(f"profile {p.id}: bin {b} outside [1, {cfg.T // 2})")


def generate_corpus(cfg: CorpusConfig, profiles) -> list[tuple[str, MotionSequence]]:
    _check_profiles(cfg, profiles)
    rng = SplitMix64(cfg.seed)
    T, N = cfg.T, cfg.N
    corpus = []
    for prof in profiles:
        bins = np.array(prof.base_bins, dtype=np.float64)
        B = bins.size
        for _ in range(cfg.sequences_per_speaker):
            phases = (math.tau * rng.uniforms(N * 3 * B)).reshape(N, 3, B)
            noise = rng.normals(T * N * 3).reshape(T, N, 3)
            frames = kernels.sinusoids(prof.amplitudes, bins, phases, T) + prof.noise_sigma * noise
            corpus.append((prof.id, MotionSequence(frames, cfg.fps)))
    return corpus


def disjoint_bin_profiles(cfg: CorpusConfig, first_bin: int = 1, bin_step: int = 2,
                          bins_per_speaker: int = 1, amplitude_range=(0.5, 1.5),
                          amplitude_seed: int = 0, noise_sigma: float = 0.0):
    """Profiles sharing one amplitude table but using disjoint frequency bins.

    Speaker ``s`` gets bins ``first_bin + bin_step * (s * bins_per_speaker + j)``.
    Identical amplitudes make per-vertex motion std uninformative about the
    speaker while the spectra stay distinct.
    """
    lo, hi = amplitude_range
    B = bins_per_speaker
    u = SplitMix64(amplitude_seed).uniforms(cfg.N * 3 * B).reshape(cfg.N, 3, B)
    amps = lo + (hi - lo) * u
    profiles = []
    for s in range(cfg.speakers):
        bins = [first_bin + bin_step * (s * B + j) for j in range(B)]
        profiles.append(SpeakerProfile(f"spk{s:02d}", bins, amps, noise_sigma))
    return profiles


# --- classification -------------------------------------------------------


def nearest_centroid_accuracy(features, mode: str = "leave-one-out") -> float:
    """Leave-one-out nearest-centroid accuracy.

    ``features`` is a list of ``(speaker_id, vector)``. Speakers are indexed
    by first appearance; distance ties go to the smallest index.
    """
    if mode != "leave-one-out":
        raise ValueError(f"unsupported mode {mode!r}")
    labels, vectors = zip(*features) if features else ((), ())
    order = list(dict.fromkeys(labels))
    if len(order) < 2:
        raise TooFewSamples("need at least two speakers")
    dims = {np.asarray(v).size for v in vectors}
    if len(dims) != 1:
        raise DimensionMismatch(f"feature vectors have differing sizes {sorted(dims)}")
    X = np.array([np.asarray(v, dtype=np.float64).ravel() for v in vectors])
    y = np.array([order.index(lab) for lab in labels])
    counts = np.bincount(y, minlength=len(order))
    if counts.min() < 2:
        raise TooFewSamples("every speaker needs at least two feature vectors")
    sums = np.zeros((len(order), X.shape[1]))
    np.add.at(sums, y, X)
    means = sums / counts[:, None]

    correct = 0
    for i in range(X.shape[0]):
        cents = means.copy()
        cents[y[i]] = (sums[y[i]] - X[i]) / (counts[y[i]] - 1)
        d = X[i] - cents
        dist = np.einsum("kd,kd->k", d, d)
        correct += int(np.argmin(dist) == y[i])
    return correct / X.shape[0]


def discriminability_experiment(cfg: CorpusConfig, profiles, bins: int = DEFAULT_BINS,
                                corpus=None) -> dict:
    """Leave-one-out speaker accuracy of std-vector vs frequency-matrix features."""
    if corpus is None:
        corpus = generate_corpus(cfg, profiles)
    return corpus_accuracies(corpus, bins)


def corpus_accuracies(corpus, bins: int = DEFAULT_BINS) -> dict:
    if len({sid for sid, _ in corpus}) == 1:
        return {"std_accuracy": 1.0, "freq_accuracy": 1.0}
    spec = SpectralConfig(bins)
    std_feats = [(sid, std_vector(seq)) for sid, seq in corpus]
    freq_feats = [(sid, frequency_matrix(seq, spec).ravel()) for sid, seq in corpus]
    return {
        "std_accuracy": nearest_centroid_accuracy(std_feats),
        "freq_accuracy": nearest_centroid_accuracy(freq_feats),
    }


# --- config and manifest files --------------------------------------------

REFERENCE_CONFIG = Path(__file__).with_name("data") / "reference_corpus.json"


def corpus_from_dict(obj) -> tuple[CorpusConfig, list[SpeakerProfile]]:
    for key in ("speakers", "sequences_per_speaker", "T", "N", "seed", "profiles"):
        if key not in obj:
            raise MissingKey(f"corpus config is missing {key!r}")
    cfg = CorpusConfig(int(obj["speakers"]), int(obj["sequences_per_speaker"]),
                       int(obj["T"]), int(obj["N"]), int(obj["seed"]), float(obj.get("fps", 25.0)))
    spec = obj["profiles"]
    if isinstance(spec, dict):
        if spec.get("kind") != "disjoint_bins":
            raise FormatError(f"unknown profile generator {spec.get('kind')!r}")
        profiles = disjoint_bin_profiles(
            cfg,
            first_bin=int(spec.get("first_bin", 1)),
            bin_step=int(spec.get("bin_step", 2)),
            bins_per_speaker=int(spec.get("bins_per_speaker", 1)),
            amplitude_range=tuple(spec.get("amplitude_range", (0.5, 1.5))),
            amplitude_seed=int(spec.get("amplitude_seed", 0)),
            noise_sigma=float(spec.get("noise_sigma", 0.0)),
        )
    elif isinstance(spec, list):
        profiles = []
        for p in spec:
            for key in ("id", "base_bins", "amplitudes"):
                if key not in p:
                    raise MissingKey(f"profile is missing {key!r}")
            profiles.append(SpeakerProfile(str(p["id"]), p["base_bins"], p["amplitudes"],
                                           float(p.get("noise_sigma", 0.0))))
    else:
        raise FormatError("profiles must be a generator object or a list")
    _check_profiles(cfg, profiles)
    return cfg, profiles


def load_corpus_config(path=REFERENCE_CONFIG):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: invalid JSON ({exc})") from exc
    return corpus_from_dict(obj)


def write_corpus(corpus, out_dir: str | os.PathLike) -> list[dict]:
    """Write one FMOT per sequence plus ``manifest.json``; returns the manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = []
    counters: dict[str, int] = {}
    for sid, seq in corpus:
        j = counters.get(sid, 0)
        counters[sid] = j + 1
        name = f"{sid}_seq{j:03d}.fmot"
        write_fmot(seq, out / name)
        manifest.append({"file": name, "speaker": sid})
    with open(out / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=1)
        fh.write("\n")
    return manifest


def read_manifest(path: str | os.PathLike) -> list[tuple[str, MotionSequence]]:
    """Load the corpus listed in a manifest; file paths are relative to it."""
    base = Path(path).parent
    with open(path, "r", encoding="utf-8") as fh:
        try:
            entries = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(entries, list):
        raise FormatError("manifest must be a JSON list")
    corpus = []
    for e in entries:
        if not isinstance(e, dict) or "file" not in e or "speaker" not in e:
            raise MissingKey("manifest entries need 'file' and 'speaker'")
        corpus.append((str(e["speaker"]), read_fmot(base / e["file"])))
    return corpus
