"""Pixel and Gabor representations, pinned against a spatial-domain oracle."""

import numpy as np
import pytest

from cfa1d.features import (
    GaborSpec,
    LabeledSample,
    feature_length,
    gabor_feature,
    gabor_kernel,
    intensity_feature,
)
from cfa1d.util import ValidationError


def shift_and_add_convolve(img, kern):
    """Zero-padded 'same' convolution without any FFT, for use as an oracle."""
    side = img.shape[0]
    r = kern.shape[0] // 2
    padded = np.zeros((side + 2 * r, side + 2 * r), dtype=np.complex128)
    padded[r : r + side, r : r + side] = img
    out = np.zeros((side, side), dtype=np.complex128)
    for a in range(kern.shape[0]):
        for b in range(kern.shape[1]):
            i0 = 2 * r - a
            j0 = 2 * r - b
            out += kern[a, b] * padded[i0 : i0 + side, j0 : j0 + side]
    return out


class TestLabeledSample:
    def test_accepts_and_freezes_vector(self):
        s = LabeledSample(vector=[1.0, 2.0], label=0, source_id="a")
        assert s.vector.dtype == np.float64

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValidationError):
            LabeledSample(vector=[1.0, np.nan], label=0)
        with pytest.raises(ValidationError):
            LabeledSample(vector=[1.0], label=-1)
        with pytest.raises(ValidationError):
            LabeledSample(vector=np.zeros((2, 2)), label=0)


class TestIntensityFeature:
    def test_identity_pass_through(self):
        img = np.linspace(0.0, 1.0, 64 * 64)
        feat = intensity_feature(img)
        assert feat.shape == (4096,)
        assert np.array_equal(feat, img)
        feat[0] = -1.0
        assert img[0] == 0.0  # returned vector is a copy

    def test_rejects_non_square_length(self):
        with pytest.raises(ValidationError):
            intensity_feature(np.zeros(50))


class TestFeatureLength:
    def test_published_configuration(self):
        assert feature_length(GaborSpec(), 64) == 5 * 8 * 16 * 16 == 10240

    def test_formula_over_valid_specs(self):
        for scales, orients, down, side in [(1, 1, 1, 8), (3, 4, 2, 16), (5, 8, 4, 32)]:
            spec = GaborSpec(scales=scales, orientations=orients, downsample=down)
            assert feature_length(spec, side) == scales * orients * (side // down) ** 2

    def test_indivisible_side_rejected(self):
        with pytest.raises(ValidationError):
            feature_length(GaborSpec(), 63)


class TestGaborKernel:
    def test_dc_component_removed(self):
        """The subtracted envelope term cancels the kernel's mean response;
        what remains is the truncated Gaussian tail, under 0.5% of the
        kernel's absolute mass at the 2.5-width window."""
        spec = GaborSpec()
        for s in range(spec.scales):
            for o in range(spec.orientations):
                kern = gabor_kernel(spec, s, o)
                assert abs(kern.sum()) <= 5e-3 * np.abs(kern).sum()

    def test_window_is_odd_square(self):
        kern = gabor_kernel(GaborSpec(), 0, 0)
        assert kern.shape[0] == kern.shape[1]
        assert kern.shape[0] % 2 == 1

    def test_index_range_checked(self):
        with pytest.raises(ValidationError):
            gabor_kernel(GaborSpec(), 5, 0)
        with pytest.raises(ValidationError):
            gabor_kernel(GaborSpec(), 0, 8)


class TestGaborFeature:
    def test_matches_spatial_convolution_oracle(self):
        """One (scale, orientation) response against the no-FFT oracle."""
        spec = GaborSpec(scales=1, orientations=1, downsample=1)
        rng = np.random.default_rng(50)
        img = rng.random(16 * 16)
        feat = gabor_feature(img, spec)
        oracle = np.abs(shift_and_add_convolve(img.reshape(16, 16), gabor_kernel(spec, 0, 0)))
        assert np.max(np.abs(feat - oracle.ravel())) <= 1e-10

    def test_impulse_reproduces_kernel_magnitude(self):
        spec = GaborSpec(scales=1, orientations=1, downsample=1)
        side = 32
        img = np.zeros(side * side)
        img[side * 16 + 16] = 1.0
        kern = gabor_kernel(spec, 0, 0)
        r = kern.shape[0] // 2
        plane = gabor_feature(img, spec).reshape(side, side)
        patch = plane[16 - r : 16 + r + 1, 16 - r : 16 + r + 1]
        assert np.allclose(patch, np.abs(kern), atol=1e-12)
        mask = np.ones((side, side), dtype=bool)
        mask[16 - r : 16 + r + 1, 16 - r : 16 + r + 1] = False
        assert np.max(plane[mask]) <= 1e-12

    def test_length_and_block_layout(self):
        """Blocks are scale-major and each block is the strided magnitude map."""
        spec = GaborSpec(scales=2, orientations=3, downsample=4)
        rng = np.random.default_rng(51)
        img = rng.random(16 * 16)
        feat = gabor_feature(img, spec)
        assert feat.size == feature_length(spec, 16)
        from scipy.signal import fftconvolve

        block = 0
        for s in range(spec.scales):
            for o in range(spec.orientations):
                mag = np.abs(fftconvolve(img.reshape(16, 16), gabor_kernel(spec, s, o), mode="same"))
                expected = mag[::4, ::4].ravel()
                got = feat[block * 16 : (block + 1) * 16]
                assert np.allclose(got, expected, atol=1e-12)
                assert got[0] == pytest.approx(mag[0, 0], abs=1e-12)
                block += 1

    def test_all_zero_image(self):
        spec = GaborSpec(downsample=2)
        assert np.array_equal(gabor_feature(np.zeros(64), spec), np.zeros(feature_length(spec, 8)))

    def test_sign_flip_invariance(self):
        rng = np.random.default_rng(52)
        img = rng.standard_normal(16 * 16)
        spec = GaborSpec(scales=2, orientations=2)
        assert np.allclose(gabor_feature(img, spec), gabor_feature(-img, spec), atol=1e-9)

    def test_nonnegative_homogeneity(self):
        rng = np.random.default_rng(53)
        img = rng.random(16 * 16)
        spec = GaborSpec(scales=1, orientations=2)
        assert np.allclose(gabor_feature(3.0 * img, spec), 3.0 * gabor_feature(img, spec), atol=1e-9)

    def test_shape_validation(self):
        with pytest.raises(ValidationError):
            gabor_feature(np.zeros(50), GaborSpec())
        with pytest.raises(ValidationError):
            gabor_feature(np.zeros(36), GaborSpec(downsample=4))  # 6 % 4 != 0
        with pytest.raises(ValidationError):
            GaborSpec(scales=0)
