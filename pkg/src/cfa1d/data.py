"""Dataset ingestion, preprocessing, split sampling, synthetic generation.

File formats
------------
Manifest: UTF-8 CSV with header ``path,class_id,session``; class ids are
nonnegative integers covering 0..L-1 with no gaps.  Images: PGM (P5) or
PNG; color inputs are converted to grayscale with the 0.299/0.587/0.114
luma weights.  Datasets (synthetic or extracted features) go to CSV with
header ``class_id,f0,f1,...`` plus a ``<file>.spec`` sidecar echoing the
generator settings when one applies.

Split sampling algorithm (pinned so splits reproduce across machines):
for repetition r, a PCG64 generator is seeded by the splitmix64 derivation
of (rng_seed, "split", r); classes are visited in ascending id, each
class's entry indices sorted ascending are permuted with one
``permutation`` call, and the first m go to the training set.  Both id
lists are returned sorted.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass

import numpy as np
from PIL import Image

from .features import LabeledSample
from .util import ValidationError, rng_for, write_kv_file, read_kv_file


@dataclass(frozen=True)
class RawImage:
    """8-bit grayscale image, row-major pixel order."""

    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValidationError("image dimensions must be positive")
        px = np.asarray(self.pixels, dtype=np.uint8)
        if px.size != self.width * self.height:
            raise ValidationError("pixel count does not match width x height")
        object.__setattr__(self, "pixels", px.reshape(self.height, self.width))


@dataclass(frozen=True)
class DatasetManifest:
    """Validated list of (path, class_id, session) entries."""

    entries: tuple[tuple[str, int, str], ...]
    class_count: int
    notes: str = ""

    def class_indices(self) -> dict[int, list[int]]:
        """Entry indices per class id, ascending within each class."""
        out: dict[int, list[int]] = {c: [] for c in range(self.class_count)}
        for i, (_, cid, _) in enumerate(self.entries):
            out[cid].append(i)
        return out


@dataclass(frozen=True)
class SplitSpec:
    m: int
    repetitions: int
    rng_seed: int

    def __post_init__(self):
        if self.m < 1:
            raise ValidationError("m must be at least 1")
        if self.repetitions < 1:
            raise ValidationError("repetitions must be at least 1")


@dataclass(frozen=True)
class SyntheticSpec:
    """Desk-scale synthetic dataset settings.

    ``warp="none"`` draws L Gaussian class clusters: centers scaled by
    ``between_spread``, per-sample noise by ``cluster_spread``.  Two
    optional ingredients recreate the structure of appearance data:

    * ``group_size`` > 1 arranges consecutive classes into groups that
      share one base center (drawn with ``between_spread``); each class
      then adds its own offset of scale ``distinct_spread``.  Classes in
      a group look alike, the way distinct faces share global appearance.
    * ``shared_rank`` > 0 moves every sample along that many random axes
      common to all classes, with per-sample coefficients of standard
      deviation ``shared_spread``, mimicking variation (lighting,
      expression) that cuts across class identity.

    ``warp="quadratic"`` arranges the classes as 3L interleaved
    concentric shells: ring j (j = 0..3L-1) sits at radius
    between_spread * (1 + 3 j / (3L - 1)) and belongs to class j mod L,
    each class occupying three non-adjacent rings.  Class identity is
    carried by the fixed quadratic form sum_j x_j^2 alone, and because
    it is non-monotone in the radius no linear separator decodes it,
    while kernel features resolve the rings locally.
    """

    L: int
    dim: int
    per_class: int
    cluster_spread: float
    between_spread: float
    warp: str = "none"
    rng_seed: int = 0
    shared_rank: int = 0
    shared_spread: float = 0.0
    group_size: int = 1
    distinct_spread: float = 0.0

    def __post_init__(self):
        if self.L < 2:
            raise ValidationError("L must be at least 2")
        if self.per_class < 2:
            raise ValidationError("per_class must be at least 2")
        if self.dim < 1:
            raise ValidationError("dim must be positive")
        if self.cluster_spread < 0 or self.between_spread < 0:
            raise ValidationError("spreads must be nonnegative")
        if self.warp not in ("none", "quadratic"):
            raise ValidationError(f"unknown warp {self.warp!r}")
        if not 0 <= self.shared_rank <= self.dim:
            raise ValidationError("shared_rank must lie in [0, dim]")
        if self.shared_spread < 0 or self.distinct_spread < 0:
            raise ValidationError("spreads must be nonnegative")
        if self.group_size < 1 or self.L % self.group_size != 0:
            raise ValidationError("group_size must divide L")
        if self.warp == "quadratic" and (self.shared_rank > 0 or self.group_size > 1):
            raise ValidationError("shared axes and groups apply to warp=none only")


def validate_manifest_rows(rows: list[tuple[str, int, str]], notes: str = "") -> DatasetManifest:
    if not rows:
        raise ValidationError("manifest has no entries")
    paths = [r[0] for r in rows]
    if len(set(paths)) != len(paths):
        dup = sorted({p for p in paths if paths.count(p) > 1})
        raise ValidationError(f"duplicate path(s) in manifest: {dup[:3]}")
    ids = sorted({r[1] for r in rows})
    L = len(ids)
    if ids != list(range(L)):
        raise ValidationError(f"class ids must cover 0..L-1 without gaps, got {ids[:10]}")
    return DatasetManifest(entries=tuple(rows), class_count=L, notes=notes)


def load_manifest(path) -> DatasetManifest:
    if not os.path.exists(path):
        raise ValidationError(f"manifest file not found: {path}")
    rows: list[tuple[str, int, str]] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:3]] != ["path", "class_id", "session"]:
            raise ValidationError("manifest must start with header path,class_id,session")
        for ln, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3:
                raise ValidationError(f"malformed row at line {ln}: expected 3 fields")
            p, cid_s, session = (c.strip() for c in row)
            if not p:
                raise ValidationError(f"malformed row at line {ln}: empty path")
            try:
                cid = int(cid_s)
            except ValueError:
                raise ValidationError(f"malformed row at line {ln}: class id {cid_s!r}") from None
            if cid < 0:
                raise ValidationError(f"malformed row at line {ln}: negative class id {cid}")
            rows.append((p, cid, session))
    return validate_manifest_rows(rows)


def load_image(path) -> RawImage:
    """Read a PGM (P5) or PNG image; color converted by 601 luma weights."""
    if not os.path.exists(path):
        raise ValidationError(f"image file not found: {path}")
    with Image.open(path) as im:
        gray = im.convert("L")  # ITU-R 601-2: L = 0.299 R + 0.587 G + 0.114 B
        px = np.asarray(gray, dtype=np.uint8)
    return RawImage(width=px.shape[1], height=px.shape[0], pixels=px)


def preprocess(img: RawImage, side: int = 64) -> np.ndarray:
    """Resize to side x side (bilinear), equalize the 256-bin histogram,
    flatten row-major to floats in [0, 1].

    Equalization maps intensity v to cdf(v) = (# pixels <= v) / (# pixels),
    so a constant image maps to all ones and a half-black/half-white image
    to the two levels 0.5 and 1.0.
    """
    if side <= 0:
        raise ValidationError("side must be positive")
    if img.width == 0 or img.height == 0:
        raise ValidationError("degenerate image")
    px = img.pixels
    if (img.height, img.width) != (side, side):
        pil = Image.fromarray(px, mode="L")
        px = np.asarray(pil.resize((side, side), Image.Resampling.BILINEAR), dtype=np.uint8)
    hist = np.bincount(px.ravel(), minlength=256)
    cdf = np.cumsum(hist) / px.size
    return cdf[px.ravel()].astype(np.float64)


def sample_split(manifest: DatasetManifest, spec: SplitSpec, rep_index: int) -> tuple[list[int], list[int]]:
    """Deterministic m-per-class train/test split for one repetition."""
    if not 0 <= rep_index < spec.repetitions:
        raise ValidationError(f"rep_index {rep_index} outside 0..{spec.repetitions - 1}")
    by_class = manifest.class_indices()
    for cid, idxs in by_class.items():
        if len(idxs) < spec.m + 1:
            raise ValidationError(
                f"class {cid} has {len(idxs)} entries, needs at least m+1={spec.m + 1}"
            )
    rng = rng_for(spec.rng_seed, "split", rep_index)
    train: list[int] = []
    test: list[int] = []
    for cid in sorted(by_class):
        idxs = np.array(sorted(by_class[cid]))
        perm = rng.permutation(idxs.size)
        train.extend(idxs[perm[: spec.m]].tolist())
        test.extend(idxs[perm[spec.m :]].tolist())
    return sorted(train), sorted(test)


def generate_synthetic(spec: SyntheticSpec) -> tuple[list[LabeledSample], DatasetManifest]:
    """Generate the seeded synthetic dataset described by ``spec``."""
    rng = rng_for(spec.rng_seed, "synth")
    samples: list[LabeledSample] = []
    rows: list[tuple[str, int, str]] = []

    if spec.warp == "none":
        bases = spec.between_spread * rng.standard_normal((spec.L // spec.group_size, spec.dim))
        centers = np.repeat(bases, spec.group_size, axis=0)
        centers = centers + spec.distinct_spread * rng.standard_normal((spec.L, spec.dim))
        axes = None
        if spec.shared_rank > 0:
            axes, _ = np.linalg.qr(rng.standard_normal((spec.dim, spec.shared_rank)))
        for l in range(spec.L):
            for i in range(spec.per_class):
                vec = centers[l] + spec.cluster_spread * rng.standard_normal(spec.dim)
                if axes is not None:
                    vec = vec + spec.shared_spread * (axes @ rng.standard_normal(spec.shared_rank))
                sid = f"synth/{l}/{i}"
                samples.append(LabeledSample(vector=vec, label=l, source_id=sid))
                rows.append((sid, l, "synth"))
    else:
        # Interleaved shells: ring j of 3L holds class j mod L; each class's
        # samples go round-robin over its three rings, inner to outer.
        radii = spec.between_spread * (1.0 + 3.0 * np.arange(3 * spec.L) / (3 * spec.L - 1))
        for l in range(spec.L):
            for i in range(spec.per_class):
                ring = l + spec.L * (i % 3)
                direction = rng.standard_normal(spec.dim)
                direction /= np.linalg.norm(direction)
                vec = radii[ring] * direction + spec.cluster_spread * rng.standard_normal(spec.dim)
                sid = f"synth/{l}/{i}"
                samples.append(LabeledSample(vector=vec, label=l, source_id=sid))
                rows.append((sid, l, "synth"))

    return samples, validate_manifest_rows(rows, notes=f"synthetic warp={spec.warp}")


def write_dataset_csv(path, samples: list[LabeledSample], spec: SyntheticSpec | None = None) -> None:
    """Serialize samples as ``class_id,f0,f1,...``; echo the spec to a sidecar."""
    if not samples:
        raise ValidationError("no samples to write")
    dim = samples[0].vector.size
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["class_id"] + [f"f{i}" for i in range(dim)])
        for s in samples:
            if s.vector.size != dim:
                raise ValidationError("samples have inconsistent dimensions")
            writer.writerow([s.label] + [repr(v) for v in s.vector.tolist()])
    if spec is not None:
        write_kv_file(
            str(path) + ".spec",
            {
                "L": spec.L,
                "dim": spec.dim,
                "per_class": spec.per_class,
                "cluster_spread": repr(spec.cluster_spread),
                "between_spread": repr(spec.between_spread),
                "warp": spec.warp,
                "rng_seed": spec.rng_seed,
                "shared_rank": spec.shared_rank,
                "shared_spread": repr(spec.shared_spread),
                "group_size": spec.group_size,
                "distinct_spread": repr(spec.distinct_spread),
            },
        )


def read_dataset_csv(path) -> tuple[list[LabeledSample], DatasetManifest]:
    """Read a ``class_id,f0,...`` dataset CSV back into labeled samples."""
    if not os.path.exists(path):
        raise ValidationError(f"dataset file not found: {path}")
    samples: list[LabeledSample] = []
    rows: list[tuple[str, int, str]] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[0].strip() != "class_id":
            raise ValidationError("dataset CSV must start with header class_id,f0,...")
        counters: dict[int, int] = {}
        for ln, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            try:
                cid = int(row[0])
                vec = np.array([float(v) for v in row[1:]], dtype=np.float64)
            except ValueError:
                raise ValidationError(f"malformed row at line {ln}") from None
            if cid < 0:
                raise ValidationError(f"malformed row at line {ln}: negative class id")
            k = counters.get(cid, 0)
            counters[cid] = k + 1
            sid = f"{os.path.basename(str(path))}/{cid}/{k}"
            samples.append(LabeledSample(vector=vec, label=cid, source_id=sid))
            rows.append((sid, cid, "csv"))
    return samples, validate_manifest_rows(rows)


def read_synthetic_sidecar(path) -> SyntheticSpec:
    """Parse a ``.spec`` sidecar back into a SyntheticSpec."""
    kv = read_kv_file(path)
    try:
        return SyntheticSpec(
            L=int(kv["L"]),
            dim=int(kv["dim"]),
            per_class=int(kv["per_class"]),
            cluster_spread=float(kv["cluster_spread"]),
            between_spread=float(kv["between_spread"]),
            warp=kv.get("warp", "none"),
            rng_seed=int(kv["rng_seed"]),
            shared_rank=int(kv.get("shared_rank", "0")),
            shared_spread=float(kv.get("shared_spread", "0.0")),
            group_size=int(kv.get("group_size", "1")),
            distinct_spread=float(kv.get("distinct_spread", "0.0")),
        )
    except KeyError as exc:
        raise ValidationError(f"sidecar missing key {exc}") from None
