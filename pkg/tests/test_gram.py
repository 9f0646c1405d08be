"""Gram construction, normalization, and spectral primitives."""

import numpy as np
import pytest

from miprune import (
    ActivationMatrix,
    InvalidDataError,
    InvalidParameterError,
    NormalizedGram,
    hadamard_joint,
    rbf_gram,
    sym_eigenvalues,
)


class TestActivationMatrix:
    def test_accepts_and_casts(self):
        x = ActivationMatrix(np.ones((3, 2), dtype=np.float32))
        assert x.values.dtype == np.float64
        assert (x.n_samples, x.n_neurons) == (3, 2)

    def test_column_accessor(self):
        rng = np.random.default_rng(0)
        vals = rng.normal(size=(5, 4))
        x = ActivationMatrix(vals)
        np.testing.assert_array_equal(x.column(2), vals[:, 2])
        with pytest.raises(InvalidParameterError):
            x.column(4)

    @pytest.mark.parametrize("shape", [(1, 5), (5, 1), (0, 3)])
    def test_rejects_tiny_shapes(self, shape):
        with pytest.raises(InvalidDataError):
            ActivationMatrix(np.ones(shape))

    def test_rejects_non_finite(self):
        bad = np.ones((3, 3))
        bad[1, 1] = np.nan
        with pytest.raises(InvalidDataError):
            ActivationMatrix(bad)

    @pytest.mark.parametrize("fraction", [0.0, -0.5, 1.5])
    def test_rejects_bad_sample_fraction(self, fraction):
        with pytest.raises(InvalidParameterError):
            ActivationMatrix(np.ones((3, 3)), sample_fraction=fraction)


class TestRbfGram:
    def test_two_sample_closed_form(self):
        """For N=2 the normalized Gram is [[1/2, e/2], [e/2, 1/2]] with
        e = exp(-(x0-x1)^2 / (2 sigma^2)), so the spectrum is
        ((1+e)/2, (1-e)/2)."""
        x = np.array([0.0, 1.3])
        sigma = 0.7
        g = rbf_gram(x, sigma)
        e = np.exp(-(1.3**2) / (2 * sigma**2))
        np.testing.assert_allclose(g.matrix, [[0.5, e / 2], [e / 2, 0.5]], rtol=1e-15)
        np.testing.assert_allclose(
            g.eigenvalues(), [(1 + e) / 2, (1 - e) / 2], rtol=1e-12
        )

    def test_unit_trace_and_diagonal(self):
        rng = np.random.default_rng(1)
        g = rbf_gram(rng.normal(size=50), 0.5)
        np.testing.assert_allclose(np.trace(g.matrix), 1.0, atol=1e-12)
        np.testing.assert_allclose(np.diag(g.matrix), 1.0 / 50, rtol=1e-12)

    def test_translation_invariance(self):
        rng = np.random.default_rng(2)
        x = rng.normal(size=30)
        a = rbf_gram(x, 0.8)
        b = rbf_gram(x + 100.0, 0.8)
        np.testing.assert_allclose(a.matrix, b.matrix, atol=1e-12)

    def test_sample_permutation_conjugates(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=20)
        perm = rng.permutation(20)
        a = rbf_gram(x, 0.6).matrix
        b = rbf_gram(x[perm], 0.6).matrix
        np.testing.assert_allclose(b, a[np.ix_(perm, perm)], rtol=1e-12)
        # the spectrum is permutation-invariant
        np.testing.assert_allclose(
            sym_eigenvalues(a), sym_eigenvalues(b), atol=1e-12
        )

    def test_multivariate_rows(self):
        rng = np.random.default_rng(4)
        g = rbf_gram(rng.normal(size=(25, 8)), 1.2)
        assert g.n_samples == 25
        np.testing.assert_allclose(np.trace(g.matrix), 1.0, atol=1e-12)

    @pytest.mark.parametrize("sigma", [0.0, -1.0, np.inf, np.nan])
    def test_rejects_bad_sigma(self, sigma):
        with pytest.raises(InvalidParameterError):
            rbf_gram(np.arange(4.0), sigma)

    def test_rejects_single_sample(self):
        with pytest.raises(InvalidDataError):
            rbf_gram(np.array([1.0]), 1.0)


class TestNormalizedGram:
    def test_rejects_asymmetric(self):
        m = np.array([[0.5, 0.1], [0.4, 0.5]])
        with pytest.raises(InvalidDataError):
            NormalizedGram(m)

    def test_rejects_wrong_trace(self):
        m = np.array([[0.6, 0.1], [0.1, 0.6]])
        with pytest.raises(InvalidDataError):
            NormalizedGram(m)

    def test_eigenvalue_cache_is_stable(self):
        g = rbf_gram(np.arange(6.0), 1.0)
        first = g.eigenvalues()
        np.testing.assert_array_equal(first, g.eigenvalues())


class TestSymEigenvalues:
    def test_descending_and_clamped(self):
        rng = np.random.default_rng(5)
        g = rbf_gram(rng.normal(size=40), 0.05)
        lam = sym_eigenvalues(g.matrix)
        assert np.all(np.diff(lam) <= 0)
        assert lam.min() >= 0.0
        np.testing.assert_allclose(lam.sum(), 1.0, atol=1e-9)

    def test_renormalizes_after_clamp(self):
        # indefinite symmetric matrix with unit trace: clamping moves the sum
        m = np.array([[0.7, 0.6], [0.6, 0.3]])
        lam = sym_eigenvalues(m)
        assert lam.min() >= 0.0
        np.testing.assert_allclose(lam.sum(), 1.0, atol=1e-12)

    def test_rejects_non_square(self):
        with pytest.raises(InvalidDataError):
            sym_eigenvalues(np.ones((2, 3)))


class TestHadamardJoint:
    def test_identical_inputs_match_narrower_kernel(self):
        """A o A renormalized equals the Gram built at sigma / sqrt(2):
        squaring exp(-d/(2 s^2)) doubles the exponent."""
        rng = np.random.default_rng(6)
        x = rng.normal(size=35)
        sigma = 0.9
        joint = hadamard_joint(rbf_gram(x, sigma), rbf_gram(x, sigma))
        narrow = rbf_gram(x, sigma / np.sqrt(2.0))
        np.testing.assert_allclose(joint.matrix, narrow.matrix, rtol=1e-12)
        assert joint.sigma is None

    def test_unit_trace(self):
        rng = np.random.default_rng(7)
        a = rbf_gram(rng.normal(size=20), 0.4)
        b = rbf_gram(rng.normal(size=20), 1.5)
        np.testing.assert_allclose(np.trace(hadamard_joint(a, b).matrix), 1.0, atol=1e-12)

    def test_rejects_size_mismatch(self):
        a = rbf_gram(np.arange(4.0), 1.0)
        b = rbf_gram(np.arange(5.0), 1.0)
        with pytest.raises(InvalidDataError):
            hadamard_joint(a, b)
