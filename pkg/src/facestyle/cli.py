"""Command-line entry point.

Exit codes: 0 success, 2 input/format error, 3 dimension/contract error,
4 numerical-domain error. Structured output is JSON with 17 significant
digits; wide feature matrices go to CSV.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import _json, features, losses, metrics, style, synth
from .errors import FaceStyleError, FormatError, MissingKey
from .motion import FMOT_MAGIC, FTPL_MAGIC, read_fmot, read_ftpl, read_mask

EXIT_OK = 0
EXIT_INPUT = 2


def _load_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: invalid JSON ({exc})") from exc


def _metric_list(text):
    names = [n.strip() for n in text.split(",") if n.strip()]
    bad = [n for n in names if n not in metrics.METRIC_NAMES]
    if bad or not names:
        raise argparse.ArgumentTypeError(
            f"metrics must be a comma list drawn from {','.join(metrics.METRIC_NAMES)}"
        )
    return tuple(names)


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


# --- subcommands ----------------------------------------------------------


def cmd_info(args):
    path = Path(args.file)
    with open(path, "rb") as fh:
        magic = fh.read(4)
    if magic == FMOT_MAGIC:
        seq = read_fmot(path)
        info = {
            "format": "FMOT",
            "version": 1,
            "T": seq.n_frames,
            "N": seq.n_vertices,
            "fps": seq.fps,
            "duration_s": seq.n_frames / seq.fps,
            "min": float(seq.frames.min()),
            "max": float(seq.frames.max()),
        }
    elif magic == FTPL_MAGIC:
        tpl = read_ftpl(path)
        info = {"format": "FTPL", "version": 1, "N": tpl.n_vertices}
    else:
        raise FormatError(f"{path}: unrecognized magic {magic!r}")
    print(_json.dumps(info))


def _pair_inputs(pred, gt):
    pred, gt = Path(pred), Path(gt)
    if pred.is_dir() != gt.is_dir():
        raise FormatError("--pred and --gt must both be files or both be directories")
    if not pred.is_dir():
        return [(gt.stem, read_fmot(pred), read_fmot(gt))]
    names = sorted(p.name for p in pred.glob("*.fmot"))
    if not names:
        raise FormatError(f"{pred}: no .fmot files")
    pairs = []
    for name in names:
        if not (gt / name).exists():
            raise FormatError(f"{gt / name}: missing ground truth for {name}")
        pairs.append((Path(name).stem, read_fmot(pred / name), read_fmot(gt / name)))
    return pairs


def cmd_eval(args):
    pairs = _pair_inputs(args.pred, args.gt)
    mask = None
    if {"lve", "fdd"} & set(args.metrics):
        if args.mask is None:
            raise MissingKey("--mask is required for lve and fdd")
        mask = read_mask(args.mask, pairs[0][2].n_vertices)
    report = metrics.evaluate_pairs(pairs, mask, args.metrics,
                                    features.SpectralConfig(args.bins), args.threads)
    _json.dump(report.to_dict(), args.out)


def cmd_features(args):
    seq = read_fmot(args.input)
    header, rows = features.feature_table(seq, args.kind, args.bins)
    features.write_feature_csv(header, rows, args.out)


def _resolve(base, value):
    p = Path(value)
    return p if p.is_absolute() else base / p


def _matrix(base, value, name):
    if isinstance(value, str):
        return features.read_matrix_csv(_resolve(base, value))
    try:
        arr = np.array(value, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{name}: not a numeric matrix") from exc
    if arr.ndim != 2:
        raise FormatError(f"{name}: expected a 2-D matrix")
    return arr


def cmd_loss(args):
    cfg = _load_json(args.config)
    if not isinstance(cfg, dict):
        raise FormatError("loss config must be a JSON object")
    base = Path(args.config).parent
    pred, gt = read_fmot(args.pred), read_fmot(args.gt)
    w = cfg.get("weights", {})
    weights = losses.LossWeights(
        rec=float(w.get("rec", 1.0)), s=float(w.get("s", 0.001)),
        tre=float(w.get("tre", 1.0)), lcon=float(w.get("lcon", 0.001)),
    )
    parts = {}
    parts["rec"], _ = losses.rec_loss(pred, gt)
    if "style" in cfg:
        st = cfg["style"]
        for key in ("pred", "gt", "speaker", "mean"):
            if key not in st:
                raise MissingKey(f"style section is missing {key!r}")
        parts["s"] = losses.style_loss(st["pred"], st["gt"], st["speaker"], st["mean"])
    parts["tre"], _ = losses.trend_loss(pred, gt, losses.TrendConfig(int(cfg.get("R", 5))))
    if "audio" in cfg or "motion" in cfg or "W_l" in cfg:
        for key in ("audio", "motion", "W_l"):
            if key not in cfg:
                raise MissingKey(f"contrastive loss needs {key!r}")
        ccfg = losses.ContrastiveConfig(float(cfg.get("tau", 0.1)), int(cfg.get("k", 5)),
                                        float(cfg.get("lambda", 0.5)))
        parts["lcon"], _, _ = losses.local_contrastive_loss(
            _matrix(base, cfg["audio"], "audio"), _matrix(base, cfg["motion"], "motion"),
            _matrix(base, cfg["W_l"], "W_l"), ccfg,
        )
    ordered = {k: parts[k] for k in ("rec", "s", "tre", "lcon") if k in parts}
    _json.dump({"value": losses.total_loss(ordered, weights), "parts": ordered}, args.out)


def cmd_style(args):
    data = _load_json(args.input)
    if not isinstance(data, dict):
        raise FormatError("style input must be a JSON object")

    def need(*keys):
        for k in keys:
            if k not in data:
                raise MissingKey(f"style input is missing {k!r}")

    def need_file(value, flag):
        if value is None:
            raise MissingKey(f"--op {args.op} requires {flag}")
        return value

    if args.op == "fuse":
        need("S_r", "S_a")
        params = style.load_params(need_file(args.params, "--params"))
        S_g, S_bias = style.fuse_style(data["S_r"], data["S_a"], params)
        out = {"S_g": S_g, "S_bias": S_bias}
    elif args.op == "infuse":
        need("Z")
        bank = style.load_bank(need_file(args.bank, "--bank"))
        if "pi" in data:
            pi = np.asarray(data["pi"], dtype=np.float64)
        elif "S_g" in data:
            pi = style.primitive_attention(data["S_g"], bank)
        else:
            raise MissingKey("infuse needs 'pi' or 'S_g'")
        W, b = style.aggregate_primitives(pi, bank)
        out = {"pi": pi, "Z_s": style.infuse_style(data["Z"], W, b)}
    else:
        need("S_r", "S_a", "Z")
        params = style.load_params(need_file(args.params, "--params"))
        bank = style.load_bank(need_file(args.bank, "--bank"))
        out = style.style_pipeline(data["S_r"], data["S_a"], params, bank, data["Z"])
    _json.dump(out, args.out)


def cmd_synth(args):
    cfg, profiles = synth.load_corpus_config(args.config)
    corpus = synth.generate_corpus(cfg, profiles)
    manifest = synth.write_corpus(corpus, args.out_dir)
    print(f"wrote {len(manifest)} sequences to {args.out_dir}", file=sys.stderr)


def cmd_experiment(args):
    corpus = synth.read_manifest(args.manifest)
    _json.dump(synth.corpus_accuracies(corpus, args.bins), args.out)


# --- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="facestyle", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("info", help="summarize an FMOT or FTPL file")
    p.add_argument("file")
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("eval", help="compute metrics for predicted vs ground-truth motion")
    p.add_argument("--pred", required=True, help="FMOT file or directory of FMOT files")
    p.add_argument("--gt", required=True, help="FMOT file or directory with matching names")
    p.add_argument("--mask", help="region mask JSON (needed for lve, fdd)")
    p.add_argument("--metrics", type=_metric_list, default=metrics.METRIC_NAMES)
    p.add_argument("--bins", type=_positive_int, default=features.DEFAULT_BINS)
    p.add_argument("--threads", type=_positive_int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("features", help="export per-channel style features as CSV")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--kind", required=True, choices=["std", "freq", "composite-mean", "composite-max"])
    p.add_argument("--bins", type=_positive_int, default=features.DEFAULT_BINS)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("loss", help="evaluate the training losses")
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_loss)

    p = sub.add_parser("style", help="run the style fusion / infusion forward pass")
    p.add_argument("--op", required=True, choices=["fuse", "infuse", "pipeline"])
    p.add_argument("--params")
    p.add_argument("--bank")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_style)

    p = sub.add_parser("synth", help="generate the synthetic multi-speaker corpus")
    p.add_argument("--config", default=str(synth.REFERENCE_CONFIG))
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("experiment", help="std vs frequency speaker discriminability")
    p.add_argument("--manifest", required=True)
    p.add_argument("--bins", type=_positive_int, default=features.DEFAULT_BINS)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except FaceStyleError as exc:
        print(f"facestyle {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, UnicodeDecodeError, ValueError, TypeError, KeyError) as exc:
        # malformed inputs that slip past schema checks (ragged arrays, wrong types)
        print(f"facestyle {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
