"""Class-dependence feature analysis over 1D spectra of PCA-projected samples.

The pipeline is: feature extraction (raw pixels or Gabor magnitudes), PCA
to p = N - 1 dimensions, a 1D DFT per sample, one correlation filter per
class (linear tradeoff designs or their kernel counterpart), and nearest
neighbor classification on the max-normalized per-class origin outputs.
"""

from .data import (
    DatasetManifest,
    RawImage,
    SplitSpec,
    SyntheticSpec,
    generate_synthetic,
    load_image,
    load_manifest,
    preprocess,
    read_dataset_csv,
    sample_split,
    write_dataset_csv,
)
from .features import (
    GaborSpec,
    LabeledSample,
    feature_length,
    gabor_feature,
    gabor_kernel,
    intensity_feature,
)
from .filterbank import (
    ClassStats,
    CorrelationFilter,
    FilterBank,
    TradeoffParams,
    build_bank,
    class_stats,
    design_otf,
    design_uootf,
    design_uotf,
    extract_feature,
    feature_matrix,
    normalize_feature,
    preset_params,
    tradeoff_quotient,
)
from .kernelcfa import (
    KernelBank,
    KernelFilter,
    KernelSpec,
    build_kernel_bank,
    gram,
    kernel_eval,
    kernel_feature,
    kernel_feature_matrix,
    kernel_quotient,
    kuootf_design,
    kuootf_system,
)
from .pipeline import (
    ClassifyResult,
    ModelBundle,
    PipelineConfig,
    RunReport,
    classify,
    evaluate,
    load_model,
    oco_dump,
    save_model,
    sweep,
    train,
)
from .spectral import (
    NoiseModel,
    Spectrum,
    correlation_output,
    correlation_plane,
    dft,
    dft_matrix,
    draw_noise_spectra,
    noise_covariance,
    origin_output,
)
from .subspace import PCAModel, pca_fit, pca_project
from .util import NumericalError, ValidationError, derive_seed, rng_for

__version__ = "0.1.0"

__all__ = [
    "ClassStats",
    "ClassifyResult",
    "CorrelationFilter",
    "DatasetManifest",
    "FilterBank",
    "GaborSpec",
    "KernelBank",
    "KernelFilter",
    "KernelSpec",
    "LabeledSample",
    "ModelBundle",
    "NoiseModel",
    "NumericalError",
    "PCAModel",
    "PipelineConfig",
    "RawImage",
    "RunReport",
    "SplitSpec",
    "Spectrum",
    "SyntheticSpec",
    "TradeoffParams",
    "ValidationError",
    "build_bank",
    "build_kernel_bank",
    "class_stats",
    "classify",
    "correlation_output",
    "correlation_plane",
    "derive_seed",
    "design_otf",
    "design_uootf",
    "design_uotf",
    "dft",
    "dft_matrix",
    "draw_noise_spectra",
    "evaluate",
    "extract_feature",
    "feature_length",
    "feature_matrix",
    "gabor_feature",
    "gabor_kernel",
    "generate_synthetic",
    "gram",
    "intensity_feature",
    "kernel_eval",
    "kernel_feature",
    "kernel_feature_matrix",
    "kernel_quotient",
    "kuootf_design",
    "kuootf_system",
    "load_image",
    "load_manifest",
    "load_model",
    "noise_covariance",
    "normalize_feature",
    "oco_dump",
    "origin_output",
    "pca_fit",
    "pca_project",
    "preprocess",
    "preset_params",
    "read_dataset_csv",
    "rng_for",
    "sample_split",
    "save_model",
    "sweep",
    "tradeoff_quotient",
    "train",
    "write_dataset_csv",
]
