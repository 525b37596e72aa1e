"""PCA projection onto the p-dimensional subspace feeding the 1D transform.

The decomposition runs through a thin SVD of the (optionally centered) data
matrix, which is the numerically stable form of the small-side Gram
eigenproblem: for N samples of dimension m with m >> N the cost is governed
by N, never by m.  Reported eigenvalues are sample-covariance eigenvalues
(1 / (N - 1) normalization, matching ``np.cov``).

Component signs are fixed deterministically: the entry of largest magnitude
in each axis is made positive, ties resolved by lowest index, so repeated
fits are bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .util import ValidationError

# Relative singular-value cutoff used for the rank estimate.
_RANK_RTOL = 1e-10


@dataclass(frozen=True)
class PCAModel:
    """Fitted subspace: axes are columns of ``basis`` (m, p)."""

    mean: np.ndarray
    basis: np.ndarray
    eigvals: np.ndarray
    centered: bool

    @property
    def p(self) -> int:
        return self.basis.shape[1]


def _as_matrix(samples) -> np.ndarray:
    if isinstance(samples, (list, tuple)) and samples and hasattr(samples[0], "vector"):
        return np.stack([s.vector for s in samples])
    return np.asarray(samples, dtype=np.float64)


def pca_fit(samples, p: int | str = "auto", center: bool = True) -> PCAModel:
    """Fit a PCA subspace to the training set.

    Parameters
    ----------
    samples : (N, m) array or list of LabeledSample, one sample per row.
    p : number of axes to keep, or ``"auto"`` for min(N - 1, rank).
    center : subtract the training mean before decomposition (default).
    """
    X = _as_matrix(samples)
    if X.ndim != 2:
        raise ValidationError("pca_fit expects an (N, m) matrix")
    N, m = X.shape
    if N < 2:
        raise ValidationError("need at least 2 training samples")

    mean = X.mean(axis=0) if center else np.zeros(m)
    Xc = X - mean

    # Thin SVD: right singular vectors are the principal axes, singular
    # values give the covariance eigenvalues after squaring.
    _, s, Vt = np.linalg.svd(Xc, full_matrices=False)
    if s[0] <= 0.0:
        raise ValidationError("training set has zero variance")
    rank = int(np.sum(s > _RANK_RTOL * s[0]))
    if rank == 0:
        raise ValidationError("training set has zero variance")

    p_max = min(N - 1, rank)
    if p == "auto":
        p_keep = p_max
    else:
        p_keep = int(p)
        if p_keep < 1:
            raise ValidationError("p must be at least 1")
        if p_keep > p_max:
            raise ValidationError(
                f"requested p={p_keep} exceeds achievable rank {p_max}"
            )

    axes = Vt[:p_keep]
    # Deterministic sign: largest-magnitude entry positive, first index wins ties.
    for row in axes:
        j = int(np.argmax(np.abs(row)))
        if row[j] < 0:
            row *= -1.0
    eigvals = (s[:p_keep] ** 2) / (N - 1)
    return PCAModel(mean=mean, basis=axes.T.copy(), eigvals=eigvals, centered=center)


def pca_project(model: PCAModel, X: np.ndarray) -> np.ndarray:
    """Project samples onto the fitted axes; accepts one vector or a matrix."""
    X = np.asarray(X, dtype=np.float64)
    single = X.ndim == 1
    if single:
        X = X[None, :]
    if X.shape[1] != model.mean.size:
        raise ValidationError("sample dimension does not match the fitted model")
    Y = (X - model.mean) @ model.basis
    return Y[0] if single else Y
