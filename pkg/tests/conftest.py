"""Shared instance builders for the filter-design oracle tests."""

import numpy as np


def random_spectra_instance(rng, p, L, N):
    """Random (N, p) training spectra with labels covering L classes.

    Spectra are DFTs of real spatial samples, so they carry the conjugate
    symmetry every pipeline input has and origin-output features stay real.
    The first L labels are 0..L-1 so no class is ever empty; N <= p keeps
    the spectra linearly independent (almost surely), which the hard
    constraint designs rely on.
    """
    X = rng.standard_normal((N, p))
    spectra = np.fft.fft(X, axis=1)
    labels = np.concatenate([np.arange(L), rng.integers(0, L, size=N - L)])
    return spectra, labels.astype(np.int64)
