"""1D spectral layer: DFT conventions, correlation outputs, noise covariance.

Every quantity downstream of this module lives in the frequency domain, so
the transform convention is pinned here once:

* forward DFT is unnormalized, ``Y(k) = sum_n y(n) exp(-j 2 pi k n / p)``,
  for arbitrary length p (the projected dimension is usually N - 1, which
  is rarely a power of two);
* the correlation plane of a data spectrum Y against a filter H is
  ``o(n) = sum_k conj(Y(k)) H(k) exp(+j 2 pi k n / p)``, whose value at the
  origin reduces to the inner product ``Y^+ H``.

With these two choices the correlation plane equals the spatial circular
cross-correlation scaled by p, which the tests pin against a brute-force
spatial implementation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .util import ValidationError, rng_for


@dataclass(frozen=True)
class Spectrum:
    """A length-p complex spectrum of one projected sample."""

    values: np.ndarray
    label: int | None = None
    source_id: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128)
        if v.ndim != 1 or v.size == 0:
            raise ValidationError("spectrum must be a non-empty 1D vector")
        if not np.all(np.isfinite(v)):
            raise ValidationError("spectrum has non-finite entries")
        object.__setattr__(self, "values", v)

    @property
    def p(self) -> int:
        return self.values.size


def dft(y: np.ndarray, label: int | None = None, source_id: str = "") -> Spectrum:
    """Unnormalized forward DFT of a real or complex 1D sample vector."""
    y = np.asarray(y)
    if y.ndim != 1 or y.size == 0:
        raise ValidationError("dft expects a non-empty 1D vector")
    return Spectrum(np.fft.fft(y), label=label, source_id=source_id)


def dft_matrix(samples: np.ndarray) -> np.ndarray:
    """Row-wise DFT of an (N, p) matrix of projected samples."""
    samples = np.asarray(samples)
    if samples.ndim != 2:
        raise ValidationError("dft_matrix expects an (N, p) matrix")
    return np.fft.fft(samples, axis=1)


def correlation_output(Y: Spectrum, H: np.ndarray, n: int) -> complex:
    """Correlation output at shift n: sum_k conj(Y_k) H_k e^{j 2 pi k n / p}."""
    H = np.asarray(H, dtype=np.complex128)
    if H.shape != Y.values.shape:
        raise ValidationError("filter and spectrum lengths differ")
    p = Y.p
    phase = np.exp(2j * np.pi * np.arange(p) * (n % p) / p)
    return complex(np.sum(np.conj(Y.values) * H * phase))


def correlation_plane(Y: Spectrum, H: np.ndarray) -> np.ndarray:
    """All p correlation outputs at once (unnormalized inverse DFT of conj(Y) H)."""
    H = np.asarray(H, dtype=np.complex128)
    if H.shape != Y.values.shape:
        raise ValidationError("filter and spectrum lengths differ")
    return np.fft.ifft(np.conj(Y.values) * H) * Y.p


def origin_output(Y: Spectrum, H: np.ndarray) -> complex:
    """Correlation output at the origin, the inner product Y^+ H."""
    H = np.asarray(H, dtype=np.complex128)
    if H.shape != Y.values.shape:
        raise ValidationError("filter and spectrum lengths differ")
    return complex(np.vdot(Y.values, H))


@dataclass(frozen=True)
class NoiseModel:
    """Noise/regularization description for the filter denominators.

    kind:
        ``white``            -> C = I (default; flat unit power spectral density)
        ``custom_diagonal``  -> C = diag(psd), psd supplied in ``diagonal``
        ``explicit_samples`` -> C is the average outer product of complex
                                white-noise spectra; either supplied in
                                ``samples`` or drawn from ``rng_seed``
        ``ridge``            -> kernel-side only: adds lambda * I_N to the
                                kernel system instead of modelling spectra
    """

    kind: str = "white"
    diagonal: np.ndarray | None = None
    samples: np.ndarray | None = None
    ridge_lambda: float = 1.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.kind not in ("white", "custom_diagonal", "explicit_samples", "ridge"):
            raise ValidationError(f"unknown noise kind {self.kind!r}")
        if self.kind == "custom_diagonal":
            d = np.asarray(self.diagonal, dtype=np.float64)
            if d.ndim != 1 or d.size == 0 or np.any(d <= 0):
                raise ValidationError("diagonal noise needs a positive psd vector")
            object.__setattr__(self, "diagonal", d)
        if self.samples is not None:
            s = np.asarray(self.samples, dtype=np.complex128)
            if s.ndim != 2 or s.shape[0] == 0:
                raise ValidationError("explicit noise samples must form a non-empty (n, p) matrix")
            object.__setattr__(self, "samples", s)
        if self.ridge_lambda <= 0:
            raise ValidationError("ridge_lambda must be positive")


def draw_noise_spectra(model: NoiseModel, p: int, count: int, index: int = 0) -> np.ndarray:
    """Draw ``count`` standard complex white-noise spectra of length p.

    Components are CN(0, 1): real and imaginary parts independent
    N(0, 1/2), so the expected outer product is the identity.  The draw is
    keyed by the model seed plus a caller index (e.g. class label) so each
    design site sees an independent but reproducible batch.
    """
    if count <= 0:
        raise ValidationError("noise sample count must be positive")
    rng = rng_for(model.rng_seed, "noise-spectra", index)
    re = rng.standard_normal((count, p))
    im = rng.standard_normal((count, p))
    return (re + 1j * im) / np.sqrt(2.0)


def noise_covariance(model: NoiseModel, p: int, count: int = 0, index: int = 0) -> np.ndarray:
    """Materialize the p x p noise covariance C for a linear filter design."""
    if p <= 0:
        raise ValidationError("p must be positive")
    if model.kind == "white":
        return np.eye(p, dtype=np.complex128)
    if model.kind == "custom_diagonal":
        if model.diagonal is None or model.diagonal.size != p:
            raise ValidationError("diagonal psd length does not match p")
        return np.diag(model.diagonal).astype(np.complex128)
    if model.kind == "explicit_samples":
        if model.samples is not None:
            samples = model.samples
            if samples.shape[1] != p:
                raise ValidationError("explicit noise samples length does not match p")
        else:
            samples = draw_noise_spectra(model, p, count, index)
        # average outer product (1/n) sum_i N_i N_i^+ with spectra as rows
        return (samples.T @ samples.conj()) / samples.shape[0]
    raise ValidationError("ridge noise applies to kernel designs only")
