"""Kernelized origin tradeoff filter: implicit filters as weights over spectra.

The kernel design never materializes a filter in feature space.  Each class
keeps a weight vector alpha over the N training spectra; the filter is
F = sum_i alpha_i phi(Y_i) and every quantity reduces to kernel
evaluations:

* intra-class numerator vector  U_i = (1/N_l) sum_j k(Y_i, Y_j_intra)
* extra-class energy            K   = w_s (1/N_el) sum_i psi_i psi_i^+
  with psi_i the column of kernel values of extra-class sample i against
  all N training spectra
* noise term, either a ridge w_n lambda I_N (default: the noise spectra
  the sample-based term would integrate over are white, and in coefficient
  space that acts as a plain regularizer) or the literal sample average
  w_n (1/N_el) sum_i ups_i ups_i^+ over seeded complex white-noise spectra
  (N_el draws, matching the extra-class count).

alpha solves K alpha = U, the maximizer of the kernel Rayleigh quotient
|U^+ alpha|^2 / (alpha^+ K alpha).  With the linear kernel and matched
noise this reproduces the linear design restricted to the span of the
training spectra, which the tests exploit as an oracle.

Kernels act on the frequency-domain spectra.  Since the transform scales
norms by sqrt(p), an rbf width delta over spectra equals width
delta / sqrt(p) over the spatial PCA features; pick whichever convention
you are matching and rescale accordingly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .filterbank import TradeoffParams, _IMAG_RTOL
from .spectral import NoiseModel, draw_noise_spectra
from .util import NumericalError, ValidationError

_ESCALATION_STEPS = 3


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family and its parameters.

    kind:
        ``rbf``        -> exp(-||X - Y||^2 / delta^2), complex Euclidean norm
        ``linear``     -> X^+ Y
        ``polynomial`` -> (Re(X^+ Y) + offset)^degree
    """

    kind: str = "rbf"
    delta: float = 3.0
    degree: int = 2
    offset: float = 1.0

    def __post_init__(self):
        if self.kind not in ("rbf", "linear", "polynomial"):
            raise ValidationError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "rbf" and self.delta <= 0:
            raise ValidationError("rbf width delta must be positive")
        if self.kind == "polynomial" and self.degree < 1:
            raise ValidationError("polynomial degree must be at least 1")


def gram(spec: KernelSpec, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Kernel matrix k(A_i, B_j) for row-stacked complex vectors."""
    A = np.atleast_2d(np.asarray(A, dtype=np.complex128))
    B = np.atleast_2d(np.asarray(B, dtype=np.complex128))
    if A.shape[1] != B.shape[1]:
        raise ValidationError("kernel arguments have different lengths")
    inner = A.conj() @ B.T
    if spec.kind == "linear":
        return inner
    if spec.kind == "polynomial":
        return (inner.real + spec.offset) ** spec.degree
    sq = (
        np.sum(np.abs(A) ** 2, axis=1)[:, None]
        + np.sum(np.abs(B) ** 2, axis=1)[None, :]
        - 2.0 * inner.real
    )
    np.clip(sq, 0.0, None, out=sq)
    return np.exp(-sq / (spec.delta**2))


def kernel_eval(spec: KernelSpec, X: np.ndarray, Y: np.ndarray):
    """Single kernel evaluation k(X, Y); real for rbf/polynomial."""
    X = np.asarray(X, dtype=np.complex128)
    Y = np.asarray(Y, dtype=np.complex128)
    if X.shape != Y.shape or X.ndim != 1:
        raise ValidationError("kernel arguments must be equal-length vectors")
    value = gram(spec, X[None, :], Y[None, :])[0, 0]
    return value if spec.kind == "linear" else float(np.real(value))


@dataclass(frozen=True)
class KernelFilter:
    """Implicit per-class filter: weights over the shared training spectra."""

    alpha: np.ndarray
    train_spectra: np.ndarray  # shared (N, p) matrix, by reference
    class_id: int
    kernel: KernelSpec
    noise_kind: str
    params: TradeoffParams


@dataclass(frozen=True)
class KernelBank:
    """One implicit filter per class, sharing the retained training spectra."""

    alphas: np.ndarray         # (N, L), one weight column per class
    labels: np.ndarray         # (L,)
    train_spectra: np.ndarray  # (N, p)
    kernel: KernelSpec
    params: TradeoffParams
    noise_kind: str

    @property
    def p(self) -> int:
        return self.train_spectra.shape[1]

    @property
    def n_classes(self) -> int:
        return self.alphas.shape[1]

    @property
    def filters(self) -> tuple[KernelFilter, ...]:
        return tuple(
            KernelFilter(alpha=self.alphas[:, j].copy(), train_spectra=self.train_spectra,
                         class_id=int(self.labels[j]), kernel=self.kernel,
                         noise_kind=self.noise_kind, params=self.params)
            for j in range(self.n_classes)
        )


def kuootf_system(
    spectra: np.ndarray,
    labels: np.ndarray,
    label: int,
    kernel: KernelSpec,
    noise: NoiseModel,
    params: TradeoffParams,
    gram_full: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Assemble (K, U) of the kernel design for one class, noise term included.

    ``gram_full`` may carry a precomputed all-pairs training Gram matrix so
    bank builds evaluate the kernel once, not once per class.
    """
    spectra = np.asarray(spectra, dtype=np.complex128)
    labels = np.asarray(labels)
    if spectra.ndim != 2 or spectra.shape[0] != labels.size:
        raise ValidationError("spectra and labels disagree on N")
    intra = labels == label
    extra = ~intra
    if not intra.any():
        raise ValidationError(f"class {label} has no training samples")
    if not extra.any():
        raise ValidationError(f"class {label} has no extra-class samples")
    N, p = spectra.shape
    n_extra = int(extra.sum())

    G = gram(kernel, spectra, spectra) if gram_full is None else gram_full
    U = G[:, intra].mean(axis=1)
    Psi = G[:, extra]
    K = (params.omega_s / n_extra) * (Psi @ Psi.conj().T)

    if noise.kind in ("ridge", "white"):
        # White noise in coefficient space is a plain ridge; both spell
        # w_n lambda I_N (lambda 1.0 unless overridden).
        lam = noise.ridge_lambda if noise.kind == "ridge" else 1.0
        K = K + (params.omega_n * lam) * np.eye(N)
    elif noise.kind == "explicit_samples":
        if noise.samples is not None:
            draws = noise.samples
            if draws.shape[1] != p:
                raise ValidationError("explicit noise samples length does not match p")
        else:
            draws = draw_noise_spectra(noise, p, n_extra, index=int(label))
        Ups = gram(kernel, spectra, draws)
        K = K + (params.omega_n / Ups.shape[1]) * (Ups @ Ups.conj().T)
    else:
        raise ValidationError(f"noise kind {noise.kind!r} not usable in the kernel design")
    return K, U


def kernel_quotient(alpha: np.ndarray, K: np.ndarray, U: np.ndarray) -> float:
    """Kernel Rayleigh quotient |U^+ alpha|^2 / (alpha^+ K alpha)."""
    alpha = np.asarray(alpha, dtype=np.complex128)
    num = abs(np.vdot(U, alpha)) ** 2
    den = np.real(np.vdot(alpha, K @ alpha))
    if den <= 0.0:
        raise NumericalError("kernel energy denominator is not positive")
    return float(num / den)


def _solve_with_escalation(K: np.ndarray, U: np.ndarray, params: TradeoffParams,
                           base_lambda: float, label: int) -> np.ndarray:
    """Cholesky solve of K alpha = U with automatic ridge escalation.

    On a singular K the ridge is raised tenfold up to three times before a
    hard error reports the condition estimate.
    """
    lam = base_lambda
    bump = 0.0
    for attempt in range(_ESCALATION_STEPS + 1):
        try:
            c, low = scipy.linalg.cho_factor(K + bump * np.eye(K.shape[0]),
                                             lower=True, check_finite=False)
            return scipy.linalg.cho_solve((c, low), U, check_finite=False)
        except scipy.linalg.LinAlgError:
            if attempt == _ESCALATION_STEPS:
                break
            lam = lam * 10.0 if attempt else lam
            bump = params.omega_n * lam
            warnings.warn(
                f"class {label}: kernel system singular, escalating ridge to {lam:g}",
                RuntimeWarning,
                stacklevel=3,
            )
    raise NumericalError(
        f"class {label}: kernel system singular after ridge escalation "
        f"(cond~{np.linalg.cond(K):.3e})"
    )


def kuootf_design(
    spectra: np.ndarray,
    labels: np.ndarray,
    label: int,
    kernel: KernelSpec,
    noise: NoiseModel,
    params: TradeoffParams,
    gram_full: np.ndarray | None = None,
) -> KernelFilter:
    """Design the implicit kernel filter for one class: solve K alpha = U."""
    K, U = kuootf_system(spectra, labels, label, kernel, noise, params, gram_full)
    base = 1.0 if noise.kind == "white" else noise.ridge_lambda
    alpha = _solve_with_escalation(K, U, params, base, int(label))
    return KernelFilter(
        alpha=alpha,
        train_spectra=np.asarray(spectra, dtype=np.complex128),
        class_id=int(label),
        kernel=kernel,
        noise_kind=noise.kind,
        params=params,
    )


def build_kernel_bank(
    spectra: np.ndarray,
    labels: np.ndarray,
    kernel: KernelSpec,
    noise: NoiseModel,
    params: TradeoffParams,
) -> KernelBank:
    """Per-class kernel designs over a single shared training Gram matrix."""
    spectra = np.asarray(spectra, dtype=np.complex128)
    labels = np.asarray(labels)
    uniq = np.unique(labels)
    if uniq.size < 2:
        raise ValidationError("need at least 2 classes")
    G = gram(kernel, spectra, spectra)
    cols = []
    for label in uniq:
        filt = kuootf_design(spectra, labels, int(label), kernel, noise, params, gram_full=G)
        cols.append(filt.alpha)
    alphas = np.stack(cols, axis=1)
    return KernelBank(
        alphas=alphas,
        labels=uniq.astype(np.int64),
        train_spectra=spectra,
        kernel=kernel,
        params=params,
        noise_kind=noise.kind,
    )


def kernel_feature(bank: KernelBank, Y) -> np.ndarray:
    """Length-L feature of one spectrum: component l = Re(sum_i conj(alpha_i^l) k(Y_i, Y))."""
    values = getattr(Y, "values", Y)
    values = np.asarray(values, dtype=np.complex128)
    if values.shape != (bank.p,):
        raise ValidationError("spectrum length does not match the retained training spectra")
    kvec = gram(bank.kernel, bank.train_spectra, values[None, :])[:, 0]
    c = bank.alphas.conj().T @ kvec
    feat = c.real.copy()
    resid = np.linalg.norm(c.imag)
    if resid > _IMAG_RTOL * np.linalg.norm(feat):
        raise NumericalError(
            f"imaginary residual {resid:.3e} exceeds tolerance in kernel features"
        )
    return feat


def kernel_feature_matrix(bank: KernelBank, spectra: np.ndarray) -> np.ndarray:
    """Row-per-sample kernel features for an (N, p) spectrum matrix."""
    spectra = np.asarray(spectra, dtype=np.complex128)
    if spectra.ndim != 2 or spectra.shape[1] != bank.p:
        raise ValidationError("spectrum matrix does not match the retained training spectra")
    kmat = gram(bank.kernel, bank.train_spectra, spectra)  # (N, n), k(Y_i, probe_j)
    c = (bank.alphas.conj().T @ kmat).T
    feats = c.real.copy()
    resid = np.linalg.norm(c.imag)
    if resid > _IMAG_RTOL * np.linalg.norm(feats):
        raise NumericalError(
            f"imaginary residual {resid:.3e} exceeds tolerance in kernel features"
        )
    return feats
