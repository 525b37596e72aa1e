"""Spatial face representations: raw pixel intensities and Gabor magnitudes.

The Gabor path follows the common wavelet convention for face work: kernels

    psi(z) = (||k||^2 / sigma^2) exp(-||k||^2 ||z||^2 / (2 sigma^2))
             [exp(j k . z) - exp(-sigma^2 / 2)]

with wave vectors k_{s,o} = (kmax / f^s) (cos phi_o, sin phi_o) and
phi_o = pi o / orientations.  The subtracted exp(-sigma^2/2) term removes
the kernel's DC component, so responses ignore uniform illumination bias.
Responses are computed by zero-padded convolution, magnitudes taken, each
map downsampled by strided picking at offset (0, 0), then concatenated
scale-major.  Response maps are not normalized individually before
concatenation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .util import ValidationError


@dataclass(frozen=True)
class LabeledSample:
    """A spatial feature vector with its class label and source id."""

    vector: np.ndarray
    label: int
    source_id: str = ""

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=np.float64)
        if v.ndim != 1 or v.size == 0:
            raise ValidationError("sample vector must be a non-empty 1D vector")
        if not np.all(np.isfinite(v)):
            raise ValidationError("sample vector has non-finite entries")
        if self.label < 0:
            raise ValidationError("class label must be nonnegative")
        object.__setattr__(self, "vector", v)


@dataclass(frozen=True)
class GaborSpec:
    scales: int = 5
    orientations: int = 8
    downsample: int = 4
    kmax: float = math.pi / 2
    spacing_f: float = math.sqrt(2.0)
    sigma: float = 2.0 * math.pi

    def __post_init__(self):
        if self.scales < 1 or self.orientations < 1 or self.downsample < 1:
            raise ValidationError("scales, orientations and downsample must be >= 1")


def feature_length(spec: GaborSpec, side: int) -> int:
    """scales x orientations x (side / downsample)^2."""
    if side % spec.downsample:
        raise ValidationError(f"side {side} not divisible by downsample {spec.downsample}")
    return spec.scales * spec.orientations * (side // spec.downsample) ** 2


def _square_side(vector: np.ndarray) -> int:
    side = math.isqrt(vector.size)
    if side * side != vector.size:
        raise ValidationError(f"length {vector.size} is not a perfect square")
    return side


def intensity_feature(img: np.ndarray) -> np.ndarray:
    """Pixel-intensity representation: the preprocessed image itself."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 1:
        raise ValidationError("intensity_feature expects a flattened image vector")
    _square_side(img)
    return img.copy()


def gabor_kernel(spec: GaborSpec, scale: int, orientation: int) -> np.ndarray:
    """Complex Gabor kernel for one (scale, orientation) pair.

    The window radius is 2.5 Gaussian envelope widths (sigma / ||k||
    pixels), enough that the truncated tail is negligible.
    """
    if not 0 <= scale < spec.scales:
        raise ValidationError("scale index out of range")
    if not 0 <= orientation < spec.orientations:
        raise ValidationError("orientation index out of range")
    knorm = spec.kmax / spec.spacing_f**scale
    phi = math.pi * orientation / spec.orientations
    kx, ky = knorm * math.cos(phi), knorm * math.sin(phi)
    radius = int(math.ceil(2.5 * spec.sigma / knorm))
    coords = np.arange(-radius, radius + 1, dtype=np.float64)
    xs, ys = np.meshgrid(coords, coords)
    sq = xs * xs + ys * ys
    envelope = (knorm**2 / spec.sigma**2) * np.exp(-(knorm**2) * sq / (2.0 * spec.sigma**2))
    carrier = np.exp(1j * (kx * xs + ky * ys)) - math.exp(-spec.sigma**2 / 2.0)
    return envelope * carrier


def gabor_feature(img: np.ndarray, spec: GaborSpec = GaborSpec()) -> np.ndarray:
    """Downsampled Gabor magnitude features of a flattened square image."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 1:
        raise ValidationError("gabor_feature expects a flattened image vector")
    side = _square_side(img)
    if side % spec.downsample:
        raise ValidationError(f"side {side} not divisible by downsample {spec.downsample}")
    plane = img.reshape(side, side)
    maps = []
    for s in range(spec.scales):
        for o in range(spec.orientations):
            kern = gabor_kernel(spec, s, o)
            resp = fftconvolve(plane, kern, mode="same")
            mag = np.abs(resp)
            maps.append(mag[:: spec.downsample, :: spec.downsample].ravel())
    return np.concatenate(maps)
