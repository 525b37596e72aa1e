"""PCA fit/projection against closed-form oracles and rank-cap rules."""

import numpy as np
import pytest

from cfa1d.subspace import pca_fit, pca_project
from cfa1d.util import ValidationError


def eig2x2(a, b, c):
    """Descending eigenvalues of the symmetric matrix [[a, b], [b, c]]."""
    disc = np.sqrt((a - c) ** 2 + 4.0 * b * b)
    return (a + c + disc) / 2.0, (a + c - disc) / 2.0


class TestEigenvalueOracle:
    def test_axis_aligned_points(self):
        """(+-a, 0), (0, +-b): sample covariance diag(2a^2/3, 2b^2/3) exactly."""
        a, b = 3.0, 1.0
        X = np.array([[a, 0.0], [-a, 0.0], [0.0, b], [0.0, -b]])
        model = pca_fit(X, p=2)
        assert np.allclose(model.eigvals, [2 * a**2 / 3, 2 * b**2 / 3], rtol=1e-12)
        # Sign convention: largest-magnitude entry positive, so exactly e1, e2.
        assert np.allclose(model.basis, np.eye(2), atol=1e-12)

    def test_right_triangle_matches_2x2_closed_form(self):
        X = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 2.0]])
        Xc = X - X.mean(axis=0)
        S = (Xc.T @ Xc) / 2.0
        lam1, lam2 = eig2x2(S[0, 0], S[0, 1], S[1, 1])
        model = pca_fit(X)
        assert model.p == 2
        assert np.allclose(model.eigvals, [lam1, lam2], rtol=1e-12)

    def test_rotated_points_rotate_the_basis(self):
        theta = 0.7
        R = np.array(
            [[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]]
        )
        a, b = 3.0, 1.0
        X = np.array([[a, 0.0], [-a, 0.0], [0.0, b], [0.0, -b]]) @ R.T
        model = pca_fit(X, p=2)
        assert np.allclose(model.eigvals, [2 * a**2 / 3, 2 * b**2 / 3], rtol=1e-10)
        for j in range(2):
            col = model.basis[:, j]
            assert min(np.linalg.norm(col - R[:, j]), np.linalg.norm(col + R[:, j])) < 1e-10

    def test_two_points_single_axis(self):
        X = np.array([[0.0, 0.0, 0.0], [1.0, 2.0, 2.0]])
        model = pca_fit(X)
        assert model.p == 1
        d = X[1] - X[0]
        assert np.allclose(np.abs(model.basis[:, 0]), np.abs(d) / np.linalg.norm(d))


class TestRankAndCapping:
    def test_auto_is_n_minus_one_on_generic_data(self):
        rng = np.random.default_rng(40)
        X = rng.standard_normal((5, 10))
        assert pca_fit(X).p == 4

    def test_auto_capped_by_rank(self):
        """Data on a 2D plane in R^10 cannot support more than 2 axes."""
        rng = np.random.default_rng(41)
        plane = rng.standard_normal((2, 10))
        X = rng.standard_normal((6, 2)) @ plane
        assert pca_fit(X).p == 2

    def test_requested_p_above_rank_rejected(self):
        rng = np.random.default_rng(42)
        X = rng.standard_normal((5, 10))
        with pytest.raises(ValidationError):
            pca_fit(X, p=5)
        assert pca_fit(X, p=3).p == 3

    def test_validation(self):
        with pytest.raises(ValidationError):
            pca_fit(np.zeros((1, 4)))
        with pytest.raises(ValidationError):
            pca_fit(np.ones((3, 4)))  # zero variance after centering
        with pytest.raises(ValidationError):
            pca_fit(np.random.default_rng(0).standard_normal((4, 4)), p=0)


class TestModelProperties:
    @pytest.fixture
    def fitted(self):
        rng = np.random.default_rng(43)
        X = rng.standard_normal((8, 20))
        return X, pca_fit(X)

    def test_orthonormal_basis(self, fitted):
        _, model = fitted
        G = model.basis.T @ model.basis
        assert np.allclose(G, np.eye(model.p), atol=1e-8)

    def test_eigvals_nonincreasing(self, fitted):
        _, model = fitted
        assert np.all(np.diff(model.eigvals) <= 1e-12)

    def test_projected_covariance_is_diagonal_eigvals(self, fitted):
        X, model = fitted
        Y = pca_project(model, X)
        cov = np.cov(Y, rowvar=False)
        assert np.allclose(np.diag(cov), model.eigvals, rtol=1e-6)
        off = cov - np.diag(np.diag(cov))
        assert np.max(np.abs(off)) <= 1e-6 * model.eigvals[0]

    def test_deterministic_including_signs(self, fitted):
        X, model = fitted
        again = pca_fit(X)
        assert np.array_equal(model.basis, again.basis)
        assert np.array_equal(model.eigvals, again.eigvals)
        assert np.array_equal(pca_project(model, X), pca_project(again, X))

    def test_projection_isometric_at_full_rank(self, fitted):
        """At p = N - 1 the projection preserves pairwise sample distances."""
        X, model = fitted
        Y = pca_project(model, X)
        for i in range(X.shape[0]):
            for j in range(i + 1, X.shape[0]):
                dx = np.linalg.norm(X[i] - X[j])
                dy = np.linalg.norm(Y[i] - Y[j])
                assert dy == pytest.approx(dx, rel=1e-9)


class TestProjection:
    def test_mean_projects_to_zero(self):
        rng = np.random.default_rng(44)
        X = rng.standard_normal((6, 12))
        model = pca_fit(X)
        assert np.allclose(pca_project(model, X.mean(axis=0)), 0.0, atol=1e-12)

    def test_mean_plus_axis_projects_to_unit_vector(self):
        rng = np.random.default_rng(45)
        X = rng.standard_normal((6, 12))
        model = pca_fit(X)
        for j in range(model.p):
            e = pca_project(model, model.mean + model.basis[:, j])
            expected = np.zeros(model.p)
            expected[j] = 1.0
            assert np.allclose(e, expected, atol=1e-10)

    def test_reconstruction_error_is_out_of_span_component(self):
        rng = np.random.default_rng(46)
        X = rng.standard_normal((5, 12))
        model = pca_fit(X, p=2)
        x = rng.standard_normal(12)
        proj = pca_project(model, x)
        recon = model.mean + model.basis @ proj
        centered = x - model.mean
        in_span = model.basis @ (model.basis.T @ centered)
        assert np.linalg.norm(x - recon) == pytest.approx(
            np.linalg.norm(centered - in_span), rel=1e-9
        )

    def test_uncentered_mode_keeps_raw_coordinates(self):
        rng = np.random.default_rng(47)
        X = rng.standard_normal((6, 8)) + 5.0
        model = pca_fit(X, center=False)
        assert np.array_equal(model.mean, np.zeros(8))
        assert np.allclose(pca_project(model, X), X @ model.basis)

    def test_dimension_mismatch(self):
        model = pca_fit(np.random.default_rng(48).standard_normal((4, 6)))
        with pytest.raises(ValidationError):
            pca_project(model, np.zeros(7))
