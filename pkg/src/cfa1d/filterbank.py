"""Per-class correlation filter designs over origin correlation outputs.

Three linear designs share one algebraic skeleton: pick the filter H that
shapes the origin correlation output ``Y^+ H`` of each training spectrum,
trading average intra-class response against suppressed energy.

``uootf``
    Maximizes |M^+ H|^2 / (H^+ (w_s R + w_n C) H) where M is the intra-class
    spectral mean and R the average outer product of extra-class spectra.
    The numerator is rank one, so the maximizer is the closed form
    H = (w_s R + w_n C)^{-1} M.

``uotf``
    Same numerator but the denominator replaces R with the diagonal average
    power spectrum D of the whole training set, D(k,k) = mean_i |Y_i(k)|^2:
    H = (w_s D + w_n C)^{-1} M.  No class contrast enters the denominator,
    which is exactly the weakness the unconstrained origin design removes.

``otf``
    Hard-constrains every training origin output to 1 (intra) or 0 (extra)
    while minimizing the same D-based energy:
    H = T^{-1} S (S^+ T^{-1} S)^{-1} u with T = w_s D + w_n C and S the
    p x N matrix of training spectra.  The constraints are only satisfiable
    as equalities when the N spectra are linearly independent, which needs
    N <= p; mean-centered projections at p = N - 1 always carry one linear
    dependency, so that regime drops to the least-squares constraint fit.

All solves go through a Cholesky factorization of the Hermitian
denominator, with a pivoted least-squares fallback plus condition warning
when the matrix is not positive definite (e.g. w_n = 0 with rank-deficient
R).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .util import NumericalError, ValidationError

# Degeneracy guard for max-normalization: a feature whose max is at or
# below this is returned unscaled and flagged instead of divided.
NORMALIZE_EPS = 1e-12

# Allowed imaginary leakage of origin outputs on conjugate-symmetric data,
# relative to the feature norm.
_IMAG_RTOL = 1e-6

LINEAR_KINDS = ("uootf", "uotf", "otf")

# Published operating points: 0.4 for the tradeoff designs, 0.3 for uotf.
_PRESET_OMEGA_S = {"uootf": 0.4, "otf": 0.4, "kuootf": 0.4, "uotf": 0.3}


@dataclass(frozen=True)
class TradeoffParams:
    """Weights (w_s, w_n) of the suppressed-energy denominator, both in [0, 1]."""

    omega_s: float
    omega_n: float

    def __post_init__(self):
        for name, w in (("omega_s", self.omega_s), ("omega_n", self.omega_n)):
            if not 0.0 <= w <= 1.0:
                raise ValidationError(f"{name} must lie in [0, 1], got {w}")
        if self.omega_s == 0.0 and self.omega_n == 0.0:
            raise ValidationError("omega_s and omega_n cannot both be zero")

    @classmethod
    def from_omega_s(cls, omega_s: float) -> "TradeoffParams":
        """Couple the weights on the unit circle: w_n = sqrt(1 - w_s^2)."""
        if not 0.0 <= omega_s <= 1.0:
            raise ValidationError(f"omega_s must lie in [0, 1], got {omega_s}")
        return cls(omega_s=omega_s, omega_n=math.sqrt(1.0 - omega_s * omega_s))


def preset_params(kind: str) -> TradeoffParams:
    """Published omega_s per design kind, omega_n coupled as sqrt(1 - w_s^2)."""
    if kind not in _PRESET_OMEGA_S:
        raise ValidationError(f"unknown filter kind {kind!r}")
    return TradeoffParams.from_omega_s(_PRESET_OMEGA_S[kind])


@dataclass(frozen=True)
class ClassStats:
    """Spectral statistics of one class against the rest of the training set."""

    label: int
    mean: np.ndarray        # intra-class spectral mean M, length p
    extra_corr: np.ndarray  # R = (1/N_el) sum of extra-class outer products, p x p
    n_intra: int
    n_extra: int


@dataclass(frozen=True)
class CorrelationFilter:
    H: np.ndarray
    class_id: int
    kind: str
    params: TradeoffParams


@dataclass(frozen=True)
class FilterBank:
    """Per-class filters stacked as the projection matrix P = [H^0 ... H^{L-1}]."""

    kind: str
    P: np.ndarray          # (p, L), one column per class, ascending class id
    labels: np.ndarray     # (L,) class ids matching the columns
    params: TradeoffParams

    @property
    def p(self) -> int:
        return self.P.shape[0]

    @property
    def n_classes(self) -> int:
        return self.P.shape[1]

    @property
    def filters(self) -> tuple[CorrelationFilter, ...]:
        return tuple(
            CorrelationFilter(H=self.P[:, j].copy(), class_id=int(self.labels[j]),
                              kind=self.kind, params=self.params)
            for j in range(self.n_classes)
        )


def class_stats(spectra: np.ndarray, labels: np.ndarray, label: int) -> ClassStats:
    """Intra-class mean and extra-class correlation for one label.

    ``spectra`` is (N, p) with one training spectrum per row.
    """
    spectra = np.asarray(spectra, dtype=np.complex128)
    labels = np.asarray(labels)
    if spectra.ndim != 2 or spectra.shape[0] != labels.size:
        raise ValidationError("spectra and labels disagree on N")
    intra = spectra[labels == label]
    extra = spectra[labels != label]
    if intra.shape[0] == 0:
        raise ValidationError(f"class {label} has no training samples")
    if extra.shape[0] == 0:
        raise ValidationError(f"class {label} has no extra-class samples")
    M = intra.mean(axis=0)
    R = (extra.T @ extra.conj()) / extra.shape[0]
    return ClassStats(
        label=int(label),
        mean=M,
        extra_corr=R,
        n_intra=intra.shape[0],
        n_extra=extra.shape[0],
    )


def solve_hermitian(T: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Solve T X = B for Hermitian T: Cholesky first, pivoted fallback after.

    The fallback (minimum-norm least squares) fires when T is not positive
    definite; it carries a condition warning so silent near-singular solves
    do not go unnoticed.
    """
    try:
        c, low = scipy.linalg.cho_factor(T, lower=True, check_finite=False)
        return scipy.linalg.cho_solve((c, low), B, check_finite=False)
    except scipy.linalg.LinAlgError:
        cond = np.linalg.cond(T)
        warnings.warn(
            f"denominator not positive definite (cond~{cond:.3e}); "
            "using least-squares fallback",
            RuntimeWarning,
            stacklevel=2,
        )
        sol, *_ = np.linalg.lstsq(T, B, rcond=None)
        return sol


def tradeoff_denominator(stats: ClassStats, C: np.ndarray, params: TradeoffParams) -> np.ndarray:
    """T = w_s R + w_n C, the energy matrix of the design objective."""
    return params.omega_s * stats.extra_corr + params.omega_n * np.asarray(C, dtype=np.complex128)


def tradeoff_quotient(H: np.ndarray, stats: ClassStats, C: np.ndarray, params: TradeoffParams) -> float:
    """Design objective |M^+ H|^2 / (H^+ T H) evaluated at an arbitrary H."""
    H = np.asarray(H, dtype=np.complex128)
    T = tradeoff_denominator(stats, C, params)
    num = abs(np.vdot(stats.mean, H)) ** 2
    den = np.real(np.vdot(H, T @ H))
    if den <= 0.0:
        raise NumericalError("energy denominator is not positive")
    return float(num / den)


def design_uootf(stats: ClassStats, C: np.ndarray, params: TradeoffParams) -> CorrelationFilter:
    """Unconstrained optimal origin tradeoff filter H = T^{-1} M."""
    T = tradeoff_denominator(stats, C, params)
    H = solve_hermitian(T, stats.mean)
    return CorrelationFilter(H=H, class_id=stats.label, kind="uootf", params=params)


def average_power(spectra: np.ndarray) -> np.ndarray:
    """Whole-set average power spectrum, D(k) = mean_i |Y_i(k)|^2."""
    spectra = np.asarray(spectra, dtype=np.complex128)
    return np.mean(np.abs(spectra) ** 2, axis=0)


def design_uotf(
    spectra: np.ndarray,
    labels: np.ndarray,
    label: int,
    C: np.ndarray,
    params: TradeoffParams,
) -> CorrelationFilter:
    """Unconstrained tradeoff filter with the class-blind power denominator."""
    stats = class_stats(spectra, labels, label)
    D = average_power(spectra)
    T = params.omega_s * np.diag(D).astype(np.complex128) + params.omega_n * np.asarray(C, dtype=np.complex128)
    H = solve_hermitian(T, stats.mean)
    return CorrelationFilter(H=H, class_id=int(label), kind="uotf", params=params)


def design_otf(
    spectra: np.ndarray,
    labels: np.ndarray,
    label: int,
    C: np.ndarray,
    params: TradeoffParams,
) -> CorrelationFilter:
    """Constrained tradeoff filter pinning every training origin output.

    Origin outputs are constrained to u_i = 1 for intra-class samples and 0
    otherwise.  With N <= p and independent spectra the constraints hold
    exactly.  With N > p (the default pipeline runs at p = N - 1) they are
    overdetermined and the design fits them in the least-squares sense,
    which is the documented regime, not an accident, so no warning fires.
    A singular constraint matrix at N <= p means duplicate training
    spectra and is reported as an error naming the colliding columns.
    """
    spectra = np.asarray(spectra, dtype=np.complex128)
    labels = np.asarray(labels)
    if spectra.shape[0] != labels.size:
        raise ValidationError("spectra and labels disagree on N")
    if not np.any(labels == label):
        raise ValidationError(f"class {label} has no training samples")
    N, p = spectra.shape
    D = average_power(spectra)
    T = params.omega_s * np.diag(D).astype(np.complex128) + params.omega_n * np.asarray(C, dtype=np.complex128)
    S = spectra.T  # p x N, one column per training spectrum
    u = (labels == label).astype(np.float64)

    TinvS = solve_hermitian(T, S)
    gram = S.conj().T @ TinvS
    if N > p:
        beta, *_ = np.linalg.lstsq(gram, u.astype(np.complex128), rcond=None)
    else:
        try:
            c, low = scipy.linalg.cho_factor(gram, lower=True, check_finite=False)
            beta = scipy.linalg.cho_solve((c, low), u.astype(np.complex128), check_finite=False)
        except scipy.linalg.LinAlgError:
            dupes = _duplicate_columns(S)
            if dupes:
                raise ValidationError(
                    f"constraint matrix singular: duplicate training spectra at column pairs {dupes}"
                ) from None
            warnings.warn(
                "constraint matrix rank deficient; "
                "fitting origin constraints in the least-squares sense",
                RuntimeWarning,
                stacklevel=2,
            )
            beta, *_ = np.linalg.lstsq(gram, u.astype(np.complex128), rcond=None)
    H = TinvS @ beta
    return CorrelationFilter(H=H, class_id=int(label), kind="otf", params=params)


def _duplicate_columns(S: np.ndarray) -> list[tuple[int, int]]:
    """Index pairs of (numerically) identical columns, for error reporting."""
    out = []
    norms = np.linalg.norm(S, axis=0)
    scale = norms.max() if norms.size else 0.0
    for i in range(S.shape[1]):
        for j in range(i + 1, S.shape[1]):
            if np.linalg.norm(S[:, i] - S[:, j]) <= 1e-12 * max(scale, 1.0):
                out.append((i, j))
    return out


def build_bank(
    spectra: np.ndarray,
    labels: np.ndarray,
    kind: str,
    C: np.ndarray,
    params: TradeoffParams,
) -> FilterBank:
    """Design one filter per class label and stack them column-wise.

    Each per-class design is a pure function of (spectra, labels, C,
    label), so the bank is schedule-independent: designing the classes in
    any order yields the same matrix.  Columns are ordered by ascending
    class id.
    """
    spectra = np.asarray(spectra, dtype=np.complex128)
    labels = np.asarray(labels)
    if kind not in LINEAR_KINDS:
        raise ValidationError(f"build_bank handles linear kinds only, got {kind!r}")
    uniq = np.unique(labels)
    if uniq.size < 2:
        raise ValidationError("need at least 2 classes")
    cols = []
    for label in uniq:
        try:
            if kind == "uootf":
                stats = class_stats(spectra, labels, int(label))
                filt = design_uootf(stats, C, params)
            elif kind == "uotf":
                filt = design_uotf(spectra, labels, int(label), C, params)
            else:
                filt = design_otf(spectra, labels, int(label), C, params)
        except (ValidationError, NumericalError) as exc:
            raise type(exc)(f"class {int(label)}: {exc}") from exc
        cols.append(filt.H)
    P = np.stack(cols, axis=1)
    return FilterBank(kind=kind, P=P, labels=uniq.astype(np.int64), params=params)


def extract_feature(bank: FilterBank, Y) -> np.ndarray:
    """Per-class origin correlation outputs of one spectrum, as real numbers.

    Accepts a Spectrum or a plain complex vector.  The complex outputs of
    conjugate-symmetric spectra against filters designed from such spectra
    are real up to rounding; the imaginary residual is checked against the
    feature norm and a violation raises, since it means a transform
    convention got out of sync somewhere.
    """
    values = getattr(Y, "values", Y)
    values = np.asarray(values, dtype=np.complex128)
    if values.shape != (bank.p,):
        raise ValidationError("spectrum length does not match the bank")
    c = np.conj(values) @ bank.P
    feat = c.real.copy()
    resid = np.linalg.norm(c.imag)
    if resid > _IMAG_RTOL * np.linalg.norm(feat):
        raise NumericalError(
            f"imaginary residual {resid:.3e} exceeds tolerance; "
            "origin outputs of real-origin data should be real"
        )
    return feat


def feature_matrix(bank: FilterBank, spectra: np.ndarray) -> np.ndarray:
    """Row-per-sample origin-output features for an (N, p) spectrum matrix."""
    spectra = np.asarray(spectra, dtype=np.complex128)
    if spectra.ndim != 2 or spectra.shape[1] != bank.p:
        raise ValidationError("spectrum matrix does not match the bank")
    c = np.conj(spectra) @ bank.P
    feats = c.real.copy()
    resid = np.linalg.norm(c.imag)
    if resid > _IMAG_RTOL * np.linalg.norm(feats):
        raise NumericalError(
            f"imaginary residual {resid:.3e} exceeds tolerance; "
            "origin outputs of real-origin data should be real"
        )
    return feats


def normalize_feature(x: np.ndarray) -> tuple[np.ndarray, bool]:
    """Scale a feature vector by its maximum entry, x / max(x).

    Returns ``(normalized, degenerate)``.  A maximum at or below the
    degeneracy guard leaves the vector unscaled with the flag set, so an
    all-zero or all-negative feature never turns into inf/NaN.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.size == 0:
        raise ValidationError("cannot normalize an empty feature")
    m = x.max()
    if m <= NORMALIZE_EPS:
        return x.copy(), True
    return x / m, False
