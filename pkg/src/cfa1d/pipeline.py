"""End-to-end orchestration: train, classify, evaluate, sweep, persistence.

Training runs the five-step recipe: PCA projection (p = N - 1 by default),
row-wise DFT, per-class filter design (linear bank or kernel weights),
origin-output feature extraction for every training sample, and per-sample
max-normalization of the resulting gallery.  Classification projects a
probe the same way and takes the nearest gallery neighbor.

Seeds follow one discipline: a single master seed feeds independent
splitmix64-derived streams for split sampling, synthetic data, and noise
draws, so adding a sweep or another filter kind never perturbs the split
sequence.
"""

from __future__ import annotations

import binascii
import json
import time
from dataclasses import dataclass, asdict, replace

import numpy as np

from .data import DatasetManifest, SplitSpec, sample_split
from .features import LabeledSample
from .filterbank import (
    FilterBank,
    TradeoffParams,
    build_bank,
    extract_feature,
    feature_matrix,
    normalize_feature,
    preset_params,
)
from .kernelcfa import (
    KernelBank,
    KernelSpec,
    build_kernel_bank,
    kernel_feature,
    kernel_feature_matrix,
)
from .spectral import NoiseModel, dft_matrix, noise_covariance
from .subspace import PCAModel, pca_fit, pca_project
from .util import NumericalError, ValidationError

FORMAT_VERSION = 1
_MAGIC = b"CFA1DMDL"


@dataclass(frozen=True)
class PipelineConfig:
    """Resolved knobs for one train/classify run; mirrors the CLI flags."""

    filter_kind: str = "uootf"
    omega_s: float | None = None     # None -> published preset for the kind
    pca_dim: int | str = "auto"
    pca_center: bool = True
    kernel: str = "rbf"
    delta: float = 3.0
    kernel_degree: int = 2
    kernel_offset: float = 1.0
    noise: str = "white"
    noise_lambda: float = 1.0
    distance: str = "euclidean"
    seed: int = 42

    def __post_init__(self):
        if self.filter_kind not in ("uootf", "uotf", "otf", "kuootf"):
            raise ValidationError(f"unknown filter kind {self.filter_kind!r}")
        if self.distance not in ("euclidean", "cosine"):
            raise ValidationError(f"unknown distance {self.distance!r}")
        if self.noise not in ("white", "custom_diagonal", "explicit_samples", "ridge"):
            raise ValidationError(f"unknown noise kind {self.noise!r}")

    def params(self) -> TradeoffParams:
        if self.omega_s is None:
            return preset_params(self.filter_kind)
        return TradeoffParams.from_omega_s(self.omega_s)

    def kernel_spec(self) -> KernelSpec:
        return KernelSpec(kind=self.kernel, delta=self.delta,
                          degree=self.kernel_degree, offset=self.kernel_offset)

    def noise_model(self) -> NoiseModel:
        return NoiseModel(kind=self.noise, ridge_lambda=self.noise_lambda,
                          rng_seed=self.seed)


@dataclass(frozen=True)
class ModelBundle:
    pca: PCAModel
    bank: FilterBank | KernelBank
    gallery_features: np.ndarray  # (N_train, L), max-normalized rows
    gallery_labels: np.ndarray    # (N_train,)
    gallery_flags: np.ndarray     # (N_train,) uint8, degenerate normalizations
    config: dict
    format_version: int = FORMAT_VERSION


@dataclass(frozen=True)
class ClassifyResult:
    predicted: int
    feature: np.ndarray
    distances: np.ndarray
    degenerate: bool


@dataclass
class RunReport:
    per_rep_accuracy: list[float]
    mean_accuracy: float
    std_accuracy: float
    confusion: np.ndarray
    timing: dict[str, float]
    flags: int
    sweep_grid: list[tuple[float, float, float]] | None = None
    best_param: float | None = None


def _stack(samples: list[LabeledSample]) -> tuple[np.ndarray, np.ndarray]:
    if len(samples) < 2:
        raise ValidationError("need at least 2 samples")
    dim = samples[0].vector.size
    for s in samples:
        if s.vector.size != dim:
            raise ValidationError("samples have inconsistent dimensions")
    X = np.stack([s.vector for s in samples])
    labels = np.array([s.label for s in samples], dtype=np.int64)
    if np.unique(labels).size < 2:
        raise ValidationError("need at least 2 classes")
    return X, labels


def train(samples: list[LabeledSample], config: PipelineConfig) -> ModelBundle:
    """Fit the full model on a training set; every stage annotates its errors."""
    X, labels = _stack(samples)
    stage = "pca"
    try:
        pca = pca_fit(X, p=config.pca_dim, center=config.pca_center)
        projected = pca_project(pca, X)
        stage = "dft"
        spectra = dft_matrix(projected)
        stage = "design"
        params = config.params()
        if config.filter_kind == "kuootf":
            bank = build_kernel_bank(spectra, labels, config.kernel_spec(),
                                     config.noise_model(), params)
        else:
            C = noise_covariance(config.noise_model(), pca.p, count=len(samples))
            bank = build_bank(spectra, labels, config.filter_kind, C, params)
        stage = "features"
        if config.filter_kind == "kuootf":
            raw = kernel_feature_matrix(bank, spectra)
        else:
            raw = feature_matrix(bank, spectra)
        gallery = np.empty_like(raw)
        flags = np.zeros(raw.shape[0], dtype=np.uint8)
        for i in range(raw.shape[0]):
            gallery[i], degen = normalize_feature(raw[i])
            flags[i] = degen
    except (ValidationError, NumericalError) as exc:
        raise type(exc)(f"train stage {stage}: {exc}") from exc

    echo = asdict(config)
    echo["resolved_omega_s"] = params.omega_s
    echo["resolved_omega_n"] = params.omega_n
    echo["p"] = pca.p
    return ModelBundle(
        pca=pca,
        bank=bank,
        gallery_features=gallery,
        gallery_labels=labels,
        gallery_flags=flags,
        config=echo,
    )


def _probe_feature(bundle: ModelBundle, vector: np.ndarray) -> np.ndarray:
    projected = pca_project(bundle.pca, vector)
    spectrum = np.fft.fft(projected)
    if isinstance(bundle.bank, KernelBank):
        return kernel_feature(bundle.bank, spectrum)
    return extract_feature(bundle.bank, spectrum)


def _distances(gallery: np.ndarray, x: np.ndarray, metric: str) -> np.ndarray:
    if metric == "euclidean":
        return np.linalg.norm(gallery - x[None, :], axis=1)
    norms = np.linalg.norm(gallery, axis=1) * max(np.linalg.norm(x), 1e-300)
    sims = np.where(norms > 0, (gallery @ x) / np.where(norms > 0, norms, 1.0), 0.0)
    return 1.0 - sims


def classify(bundle: ModelBundle, probe) -> ClassifyResult:
    """Nearest-gallery-neighbor prediction for one probe vector."""
    vector = getattr(probe, "vector", probe)
    vector = np.asarray(vector, dtype=np.float64)
    if vector.shape != (bundle.pca.mean.size,):
        raise ValidationError("probe length does not match the trained model")
    raw = _probe_feature(bundle, vector)
    feat, degenerate = normalize_feature(raw)
    metric = bundle.config.get("distance", "euclidean")
    dists = _distances(bundle.gallery_features, feat, metric)
    idx = int(np.argmin(dists))  # argmin takes the first minimum: lowest index wins ties
    return ClassifyResult(
        predicted=int(bundle.gallery_labels[idx]),
        feature=feat,
        distances=dists,
        degenerate=degenerate,
    )


def oco_dump(bundle: ModelBundle, probe) -> tuple[np.ndarray, np.ndarray, bool]:
    """Per-class normalized origin outputs of one probe.

    Returns (class ids, normalized outputs, degenerate flag); rows pair
    ``class_ids[i]`` with ``outputs[i]``, ready for CSV or a stem plot.
    """
    vector = getattr(probe, "vector", probe)
    vector = np.asarray(vector, dtype=np.float64)
    if vector.shape != (bundle.pca.mean.size,):
        raise ValidationError("probe length does not match the trained model")
    raw = _probe_feature(bundle, vector)
    feat, degenerate = normalize_feature(raw)
    return bundle.bank.labels.copy(), feat, degenerate


def evaluate(
    samples: list[LabeledSample],
    manifest: DatasetManifest,
    split: SplitSpec,
    config: PipelineConfig,
) -> RunReport:
    """Repeated random-split evaluation: m train samples per class, rest test."""
    if len(samples) != len(manifest.entries):
        raise ValidationError("samples and manifest entries are misaligned")
    L = manifest.class_count
    confusion = np.zeros((L, L), dtype=np.int64)
    accs: list[float] = []
    flags = 0
    timing = {"split": 0.0, "train": 0.0, "classify": 0.0}

    for rep in range(split.repetitions):
        t0 = time.perf_counter()
        train_ids, test_ids = sample_split(manifest, split, rep)
        t1 = time.perf_counter()
        bundle = train([samples[i] for i in train_ids], config)
        t2 = time.perf_counter()
        flags += int(bundle.gallery_flags.sum())
        hits = 0
        for i in test_ids:
            res = classify(bundle, samples[i])
            flags += int(res.degenerate)
            true = samples[i].label
            confusion[true, res.predicted] += 1
            hits += int(res.predicted == true)
        t3 = time.perf_counter()
        accs.append(hits / len(test_ids))
        timing["split"] += t1 - t0
        timing["train"] += t2 - t1
        timing["classify"] += t3 - t2

    return RunReport(
        per_rep_accuracy=accs,
        mean_accuracy=float(np.mean(accs)),
        std_accuracy=float(np.std(accs)),
        confusion=confusion,
        timing=timing,
        flags=flags,
    )


def sweep(
    param: str,
    grid: list[float],
    samples: list[LabeledSample],
    manifest: DatasetManifest,
    split: SplitSpec,
    config: PipelineConfig,
) -> RunReport:
    """One evaluate per grid value with shared split seeds; best value kept."""
    if param not in ("omega_s", "rbf_delta"):
        raise ValidationError(f"unknown sweep parameter {param!r}")
    if not grid:
        raise ValidationError("sweep grid is empty")
    grid_rows: list[tuple[float, float, float]] = []
    best: RunReport | None = None
    best_value = None
    for value in grid:
        if param == "omega_s":
            cfg = replace(config, omega_s=float(value))
        else:
            if config.filter_kind != "kuootf" or config.kernel != "rbf":
                raise ValidationError("rbf_delta sweep needs filter kuootf with the rbf kernel")
            cfg = replace(config, delta=float(value))
        report = evaluate(samples, manifest, split, cfg)
        grid_rows.append((float(value), report.mean_accuracy, report.std_accuracy))
        if best is None or report.mean_accuracy > best.mean_accuracy:
            best = report
            best_value = float(value)
    best.sweep_grid = grid_rows
    best.best_param = best_value
    return best


# ---------------------------------------------------------------------------
# reports on disk

def write_report_csv(report: RunReport, path) -> None:
    """Results CSV: ``rep,accuracy`` rows plus a commented summary block."""
    lines = ["rep,accuracy"]
    for i, acc in enumerate(report.per_rep_accuracy):
        lines.append(f"{i},{acc!r}")
    lines.append("# summary")
    lines.append(f"# mean_accuracy,{report.mean_accuracy!r}")
    lines.append(f"# std_accuracy,{report.std_accuracy!r}")
    lines.append(f"# degenerate_flags,{report.flags}")
    if report.best_param is not None:
        lines.append(f"# best_param,{report.best_param!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def write_sweep_csv(report: RunReport, path) -> None:
    """Sweep CSV: ``param_value,mean_accuracy,std_accuracy`` per grid point."""
    if report.sweep_grid is None:
        raise ValidationError("report carries no sweep grid")
    lines = ["param_value,mean_accuracy,std_accuracy"]
    for value, mean, std in report.sweep_grid:
        lines.append(f"{value!r},{mean!r},{std!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def write_oco_csv(class_ids: np.ndarray, outputs: np.ndarray, degenerate: bool, path) -> None:
    """OCO CSV: ``class_id,normalized_output`` rows plus the degeneracy flag."""
    lines = ["class_id,normalized_output"]
    for cid, val in zip(class_ids, outputs):
        lines.append(f"{int(cid)},{float(val)!r}")
    lines.append(f"# degenerate,{int(degenerate)}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# model persistence
#
# Single-file layout, all integers little-endian:
#   magic "CFA1DMDL" | u32 version | u64 header length | header JSON |
#   array payloads (raw bytes, order as listed in the header) | u32 CRC32
# The CRC covers everything before it.  Complex vectors are stored as
# little-endian complex128, i.e. interleaved float64 (re, im) pairs.

_DTYPES = {"f8": "<f8", "c16": "<c16", "i8": "<i8", "u1": "|u1"}


def _bundle_arrays(bundle: ModelBundle) -> list[tuple[str, str, np.ndarray]]:
    arrays = [
        ("pca_mean", "f8", bundle.pca.mean),
        ("pca_basis", "f8", bundle.pca.basis),
        ("pca_eigvals", "f8", bundle.pca.eigvals),
        ("gallery_features", "f8", bundle.gallery_features),
        ("gallery_labels", "i8", bundle.gallery_labels),
        ("gallery_flags", "u1", bundle.gallery_flags),
        ("bank_labels", "i8", bundle.bank.labels),
    ]
    if isinstance(bundle.bank, KernelBank):
        arrays.append(("bank_alphas", "c16", bundle.bank.alphas))
        arrays.append(("bank_train_spectra", "c16", bundle.bank.train_spectra))
    else:
        arrays.append(("bank_P", "c16", bundle.bank.P))
    return arrays


def save_model(bundle: ModelBundle, path) -> None:
    arrays = _bundle_arrays(bundle)
    bank = bundle.bank
    header: dict = {
        "config": bundle.config,
        "pca": {"centered": bool(bundle.pca.centered)},
        "params": {"omega_s": bank.params.omega_s, "omega_n": bank.params.omega_n},
        "arrays": [
            {"name": name, "dtype": code, "shape": list(arr.shape)}
            for name, code, arr in arrays
        ],
    }
    if isinstance(bank, KernelBank):
        header["bank"] = {
            "type": "kernel",
            "kind": "kuootf",
            "noise_kind": bank.noise_kind,
            "kernel": {
                "kind": bank.kernel.kind,
                "delta": bank.kernel.delta,
                "degree": bank.kernel.degree,
                "offset": bank.kernel.offset,
            },
        }
    else:
        header["bank"] = {"type": "linear", "kind": bank.kind}

    blob = bytearray()
    blob += _MAGIC
    blob += FORMAT_VERSION.to_bytes(4, "little")
    header_bytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    blob += len(header_bytes).to_bytes(8, "little")
    blob += header_bytes
    for _, code, arr in arrays:
        blob += np.ascontiguousarray(arr).astype(_DTYPES[code]).tobytes()
    blob += (binascii.crc32(bytes(blob)) & 0xFFFFFFFF).to_bytes(4, "little")
    with open(path, "wb") as fh:
        fh.write(bytes(blob))


def load_model(path) -> ModelBundle:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < len(_MAGIC) + 16 or blob[: len(_MAGIC)] != _MAGIC:
        raise ValidationError("not a model bundle (bad magic)")
    stored_crc = int.from_bytes(blob[-4:], "little")
    if binascii.crc32(blob[:-4]) & 0xFFFFFFFF != stored_crc:
        raise ValidationError("model bundle corrupted (checksum mismatch)")
    off = len(_MAGIC)
    version = int.from_bytes(blob[off : off + 4], "little")
    off += 4
    if version != FORMAT_VERSION:
        raise ValidationError(f"unsupported bundle version {version}")
    hlen = int.from_bytes(blob[off : off + 8], "little")
    off += 8
    header = json.loads(blob[off : off + hlen].decode("utf-8"))
    off += hlen

    arrays: dict[str, np.ndarray] = {}
    for entry in header["arrays"]:
        dtype = np.dtype(_DTYPES[entry["dtype"]])
        count = int(np.prod(entry["shape"])) if entry["shape"] else 1
        nbytes = dtype.itemsize * count
        arr = np.frombuffer(blob[off : off + nbytes], dtype=dtype).reshape(entry["shape"]).copy()
        arrays[entry["name"]] = arr
        off += nbytes
    if off != len(blob) - 4:
        raise ValidationError("model bundle truncated or oversized payload")

    params = TradeoffParams(header["params"]["omega_s"], header["params"]["omega_n"])
    pca = PCAModel(
        mean=arrays["pca_mean"],
        basis=arrays["pca_basis"],
        eigvals=arrays["pca_eigvals"],
        centered=header["pca"]["centered"],
    )
    if header["bank"]["type"] == "kernel":
        kspec = KernelSpec(**header["bank"]["kernel"])
        bank: FilterBank | KernelBank = KernelBank(
            alphas=arrays["bank_alphas"],
            labels=arrays["bank_labels"],
            train_spectra=arrays["bank_train_spectra"],
            kernel=kspec,
            params=params,
            noise_kind=header["bank"]["noise_kind"],
        )
    else:
        bank = FilterBank(
            kind=header["bank"]["kind"],
            P=arrays["bank_P"],
            labels=arrays["bank_labels"],
            params=params,
        )
    return ModelBundle(
        pca=pca,
        bank=bank,
        gallery_features=arrays["gallery_features"],
        gallery_labels=arrays["gallery_labels"],
        gallery_flags=arrays["gallery_flags"],
        config=header["config"],
        format_version=version,
    )
