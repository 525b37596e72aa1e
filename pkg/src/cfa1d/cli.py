"""Command-line front end.

Subcommands: synth, ingest, train, evaluate, sweep, oco.  Every flag can
also come from a flat key=value config file (``--config``); keys are the
long flag names with dashes replaced by underscores, and flags given on
the command line win over the file.

Report-writing subcommands (evaluate, sweep, oco) render matplotlib
figures next to their CSV output, sharing the CSV's base name.

Exit codes: 0 success, 2 validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .data import (
    SplitSpec,
    SyntheticSpec,
    generate_synthetic,
    load_image,
    load_manifest,
    preprocess,
    read_dataset_csv,
    write_dataset_csv,
)
from .features import GaborSpec, LabeledSample, gabor_feature, intensity_feature
from .pipeline import (
    PipelineConfig,
    evaluate,
    load_model,
    oco_dump,
    save_model,
    sweep,
    train,
    write_oco_csv,
    write_report_csv,
    write_sweep_csv,
)
from .util import NumericalError, ValidationError, read_kv_file

_NOISE_ALIASES = {"explicit": "explicit_samples"}
_SWEEP_ALIASES = {"omega-s": "omega_s", "delta": "rbf_delta"}


def _parse_bool(text: str) -> bool:
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValidationError(f"expected a boolean, got {text!r}")


def _resolve(args: argparse.Namespace, defaults: dict) -> dict:
    """Merge CLI values over config-file values over built-in defaults."""
    file_cfg = {}
    cfg_path = getattr(args, "config", None)
    if cfg_path:
        if not os.path.exists(cfg_path):
            raise ValidationError(f"config file not found: {cfg_path}")
        file_cfg = read_kv_file(cfg_path)
    out = {}
    for key, (default, cast) in defaults.items():
        cli_val = getattr(args, key, None)
        if cli_val is not None:
            out[key] = cli_val
        elif key in file_cfg:
            out[key] = cast(file_cfg[key])
        else:
            out[key] = default
    return out


_MODEL_DEFAULTS = {
    "filter": ("uootf", str),
    "omega_s": (None, float),
    "pca_dim": ("auto", str),
    "pca_center": (True, _parse_bool),
    "kernel": ("rbf", str),
    "delta": (3.0, float),
    "degree": (2, int),
    "offset": (1.0, float),
    "noise": ("white", str),
    "noise_lambda": (1.0, float),
    "distance": ("euclidean", str),
    "seed": (42, int),
}


def _add_model_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--filter", choices=["uootf", "uotf", "otf", "kuootf"])
    sub.add_argument("--omega-s", dest="omega_s", type=float)
    sub.add_argument("--pca-dim", dest="pca_dim")
    sub.add_argument("--pca-center", dest="pca_center", type=_parse_bool)
    sub.add_argument("--kernel", choices=["rbf", "linear", "polynomial"])
    sub.add_argument("--delta", type=float)
    sub.add_argument("--degree", type=int)
    sub.add_argument("--offset", type=float)
    sub.add_argument("--noise", choices=["white", "ridge", "explicit", "explicit_samples"])
    sub.add_argument("--noise-lambda", dest="noise_lambda", type=float)
    sub.add_argument("--distance", choices=["euclidean", "cosine"])
    sub.add_argument("--seed", type=int)


def _pipeline_config(vals: dict) -> PipelineConfig:
    pca_dim: int | str = vals["pca_dim"]
    if pca_dim != "auto":
        try:
            pca_dim = int(pca_dim)
        except (TypeError, ValueError):
            raise ValidationError(f"pca_dim must be 'auto' or an integer, got {pca_dim!r}") from None
    return PipelineConfig(
        filter_kind=vals["filter"],
        omega_s=vals["omega_s"],
        pca_dim=pca_dim,
        pca_center=vals["pca_center"],
        kernel=vals["kernel"],
        delta=vals["delta"],
        kernel_degree=vals["degree"],
        kernel_offset=vals["offset"],
        noise=_NOISE_ALIASES.get(vals["noise"], vals["noise"]),
        noise_lambda=vals["noise_lambda"],
        distance=vals["distance"],
        seed=vals["seed"],
    )


def _figure_path(csv_path: str, suffix: str) -> str:
    base, _ = os.path.splitext(csv_path)
    return f"{base}_{suffix}.png"


def _cmd_synth(args: argparse.Namespace) -> int:
    defaults = {
        "L": (20, int),
        "dim": (64, int),
        "per_class": (6, int),
        "cluster_spread": (1.0, float),
        "between_spread": (1.0, float),
        "warp": ("none", str),
        "seed": (0, int),
        "shared_rank": (0, int),
        "shared_spread": (0.0, float),
        "group_size": (1, int),
        "distinct_spread": (0.0, float),
    }
    vals = _resolve(args, defaults)
    spec = SyntheticSpec(
        L=vals["L"],
        dim=vals["dim"],
        per_class=vals["per_class"],
        cluster_spread=vals["cluster_spread"],
        between_spread=vals["between_spread"],
        warp=vals["warp"],
        rng_seed=vals["seed"],
        shared_rank=vals["shared_rank"],
        shared_spread=vals["shared_spread"],
        group_size=vals["group_size"],
        distinct_spread=vals["distinct_spread"],
    )
    samples, _ = generate_synthetic(spec)
    write_dataset_csv(args.out, samples, spec)
    print(f"wrote {len(samples)} samples ({spec.L} classes) to {args.out}")
    return 0


def _cmd_ingest(args: argparse.Namespace) -> int:
    defaults = {"feature": ("pixel", str), "side": (64, int)}
    vals = _resolve(args, defaults)
    manifest = load_manifest(args.manifest)
    root = os.path.dirname(os.path.abspath(args.manifest))
    gspec = GaborSpec()
    samples: list[LabeledSample] = []
    for path, cid, _ in manifest.entries:
        full = path if os.path.isabs(path) else os.path.join(root, path)
        vec = preprocess(load_image(full), side=vals["side"])
        if vals["feature"] == "pixel":
            feat = intensity_feature(vec)
        elif vals["feature"] == "gabor":
            feat = gabor_feature(vec, gspec)
        else:
            raise ValidationError(f"unknown feature kind {vals['feature']!r}")
        samples.append(LabeledSample(vector=feat, label=cid, source_id=path))
    write_dataset_csv(args.out, samples)
    print(f"extracted {vals['feature']} features for {len(samples)} images to {args.out}")
    return 0


def _cmd_train(args: argparse.Namespace) -> int:
    vals = _resolve(args, _MODEL_DEFAULTS)
    config = _pipeline_config(vals)
    samples, _ = read_dataset_csv(args.data)
    bundle = train(samples, config)
    save_model(bundle, args.out)
    print(f"trained {config.filter_kind} on {len(samples)} samples "
          f"(p={bundle.pca.p}, L={bundle.bank.labels.size}); model at {args.out}")
    return 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    defaults = dict(_MODEL_DEFAULTS)
    defaults.update({"m": (3, int), "reps": (20, int)})
    vals = _resolve(args, defaults)
    config = _pipeline_config(vals)
    samples, manifest = read_dataset_csv(args.data)
    split = SplitSpec(m=vals["m"], repetitions=vals["reps"], rng_seed=vals["seed"])
    report = evaluate(samples, manifest, split, config)
    write_report_csv(report, args.out)
    from .plotting import plot_confusion, plot_per_rep_accuracy

    plot_per_rep_accuracy(report, _figure_path(args.out, "accuracy"))
    plot_confusion(report, _figure_path(args.out, "confusion"))
    print(f"mean accuracy {report.mean_accuracy:.4f} "
          f"(std {report.std_accuracy:.4f}, {split.repetitions} reps); report at {args.out}")
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    defaults = dict(_MODEL_DEFAULTS)
    defaults.update({"m": (3, int), "reps": (20, int)})
    vals = _resolve(args, defaults)
    config = _pipeline_config(vals)
    samples, manifest = read_dataset_csv(args.data)
    split = SplitSpec(m=vals["m"], repetitions=vals["reps"], rng_seed=vals["seed"])
    param = _SWEEP_ALIASES.get(args.param, args.param)
    try:
        grid = [float(v) for v in args.grid.split(",") if v.strip()]
    except ValueError:
        raise ValidationError(f"bad sweep grid {args.grid!r}; expected comma-separated numbers") from None
    report = sweep(param, grid, samples, manifest, split, config)
    write_sweep_csv(report, args.out)
    from .plotting import plot_sweep

    plot_sweep(report, args.param, _figure_path(args.out, "sweep"))
    print(f"best {args.param}={report.best_param:g} "
          f"with mean accuracy {report.mean_accuracy:.4f}; sweep at {args.out}")
    return 0


def _cmd_oco(args: argparse.Namespace) -> int:
    bundle = load_model(args.model)
    samples, _ = read_dataset_csv(args.probe)
    if not 0 <= args.index < len(samples):
        raise ValidationError(f"probe index {args.index} outside 0..{len(samples) - 1}")
    probe = samples[args.index]
    class_ids, outputs, degenerate = oco_dump(bundle, probe)
    write_oco_csv(class_ids, outputs, degenerate, args.out)
    from .plotting import plot_oco

    plot_oco(class_ids, outputs, _figure_path(args.out, "oco"))
    peak = int(class_ids[int(np.argmax(outputs))])
    print(f"probe {args.index} (class {probe.label}): peak response at class {peak}; "
          f"outputs at {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cfa1d",
        description="Class-dependence feature analysis on 1D spectra of PCA-projected samples.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p_synth = subs.add_parser("synth", help="generate a seeded synthetic dataset CSV")
    p_synth.add_argument("--config")
    p_synth.add_argument("--L", type=int)
    p_synth.add_argument("--dim", type=int)
    p_synth.add_argument("--per-class", dest="per_class", type=int)
    p_synth.add_argument("--cluster-spread", dest="cluster_spread", type=float)
    p_synth.add_argument("--between-spread", dest="between_spread", type=float)
    p_synth.add_argument("--warp", choices=["none", "quadratic"])
    p_synth.add_argument("--seed", type=int)
    p_synth.add_argument("--shared-rank", dest="shared_rank", type=int)
    p_synth.add_argument("--shared-spread", dest="shared_spread", type=float)
    p_synth.add_argument("--group-size", dest="group_size", type=int)
    p_synth.add_argument("--distinct-spread", dest="distinct_spread", type=float)
    p_synth.add_argument("--out", required=True)
    p_synth.set_defaults(func=_cmd_synth)

    p_ingest = subs.add_parser("ingest", help="validate a manifest and extract image features")
    p_ingest.add_argument("--config")
    p_ingest.add_argument("--manifest", required=True)
    p_ingest.add_argument("--feature", choices=["pixel", "gabor"])
    p_ingest.add_argument("--side", type=int)
    p_ingest.add_argument("--out", required=True)
    p_ingest.set_defaults(func=_cmd_ingest)

    p_train = subs.add_parser("train", help="train a filter bank model on a dataset CSV")
    p_train.add_argument("--config")
    p_train.add_argument("--data", required=True)
    _add_model_flags(p_train)
    p_train.add_argument("--out", required=True)
    p_train.set_defaults(func=_cmd_train)

    p_eval = subs.add_parser("evaluate", help="repeated random-split evaluation")
    p_eval.add_argument("--config")
    p_eval.add_argument("--data", required=True)
    _add_model_flags(p_eval)
    p_eval.add_argument("--m", type=int)
    p_eval.add_argument("--reps", type=int)
    p_eval.add_argument("--out", required=True)
    p_eval.set_defaults(func=_cmd_evaluate)

    p_sweep = subs.add_parser("sweep", help="sweep omega-s or the rbf delta")
    p_sweep.add_argument("--config")
    p_sweep.add_argument("--data", required=True)
    _add_model_flags(p_sweep)
    p_sweep.add_argument("--m", type=int)
    p_sweep.add_argument("--reps", type=int)
    p_sweep.add_argument("--param", required=True, choices=["omega-s", "delta"])
    p_sweep.add_argument("--grid", required=True,
                         help="comma-separated values, e.g. 0.1,0.2,0.4")
    p_sweep.add_argument("--out", required=True)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_oco = subs.add_parser("oco", help="dump per-class origin outputs for one probe")
    p_oco.add_argument("--model", required=True)
    p_oco.add_argument("--probe", required=True,
                       help="dataset CSV holding the probe row(s)")
    p_oco.add_argument("--index", type=int, default=0)
    p_oco.add_argument("--out", required=True)
    p_oco.set_defaults(func=_cmd_oco)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
