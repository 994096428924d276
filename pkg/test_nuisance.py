"""Tests for basis expansion and the ridge / IRLS regressions."""

import numpy as np
import pytest
from scipy.special import expit

from causal_evidence.errors import DegenerateCovariate, DimensionMismatch, SingularDesign
from causal_evidence.models import BasisKind, BasisSpec
from causal_evidence.nuisance import (
    Family,
    basis_feature_names,
    expand_basis,
    fit_regression,
    logistic_gradient,
    predict,
    predict_batch,
    set_binary,
)


class TestExpandBasis:
    def test_linear_columns(self, rng):
        c = rng.normal(size=(20, 3))
        design = expand_basis(c, (), BasisSpec(kind=BasisKind.LINEAR))
        assert design.shape == (20, 4)
        np.testing.assert_array_equal(design[:, 0], 1.0)

    def test_binary_columns_follow_intercept(self, rng):
        c = rng.normal(size=(10, 1))
        a = (rng.random(10) < 0.5).astype(float)
        design = expand_basis(c, (a,), BasisSpec(kind=BasisKind.LINEAR))
        np.testing.assert_array_equal(design[:, 1], a)

    def test_polynomial_width(self, rng):
        design = expand_basis(rng.normal(size=(15, 2)), (), BasisSpec.parse("poly:3"))
        assert design.shape == (15, 1 + 2 * 3)

    def test_spline_width_single_covariate(self, rng):
        # intercept + cubic + three truncated-power terms
        design = expand_basis(rng.uniform(-2, 2, size=(50, 1)), (), BasisSpec.parse("spline:3"))
        assert design.shape == (50, 7)

    def test_interactions_add_pairs(self, rng):
        spec = BasisSpec.parse("linear", include_interactions=True)
        design = expand_basis(rng.normal(size=(12, 4)), (), spec)
        assert design.shape == (12, 1 + 4 + 6)

    def test_feature_names_match_columns(self, rng):
        spec = BasisSpec.parse("spline:2", include_interactions=True)
        design = expand_basis(rng.normal(size=(30, 2)), (np.ones(30),), spec)
        names = basis_feature_names(["c1", "c2"], ["a"], spec)
        assert len(names) == design.shape[1]
        assert names[:2] == ("intercept", "a")

    def test_constant_covariate_has_no_spline(self):
        with pytest.raises(DegenerateCovariate):
            expand_basis(np.ones((10, 1)), (), BasisSpec())

    def test_no_covariates_is_intercept_only(self):
        assert expand_basis(np.empty((5, 0)), (), BasisSpec()).shape == (5, 1)

    def test_set_binary_copies(self, rng):
        design = expand_basis(rng.normal(size=(6, 1)), (np.zeros(6),), BasisSpec(kind=BasisKind.LINEAR))
        treated = set_binary(design, 0, 1.0)
        np.testing.assert_array_equal(treated[:, 1], 1.0)
        np.testing.assert_array_equal(design[:, 1], 0.0)


class TestGaussian:
    def test_recovers_exact_line(self):
        x = np.linspace(-1, 1, 10)
        design = np.column_stack([np.ones(10), x])
        model = fit_regression(Family.GAUSSIAN, design, 3.0 + 2.0 * x, ridge=0.0)
        np.testing.assert_allclose(model.coefficients, [3.0, 2.0], atol=1e-10)
        assert predict(model, np.array([1.0, 0.5])) == pytest.approx(4.0)

    def test_rank_deficient_without_ridge(self):
        x = np.arange(6, dtype=float)
        design = np.column_stack([np.ones(6), x, 2 * x])
        with pytest.raises(SingularDesign):
            fit_regression(Family.GAUSSIAN, design, x, ridge=0.0)

    def test_ridge_rescues_collinear_design(self):
        x = np.arange(6, dtype=float)
        design = np.column_stack([np.ones(6), x, 2 * x])
        model = fit_regression(Family.GAUSSIAN, design, x, ridge=1e-6)
        np.testing.assert_allclose(predict_batch(model, design), x, atol=1e-4)

    def test_response_length_checked(self):
        with pytest.raises(DimensionMismatch):
            fit_regression(Family.GAUSSIAN, np.ones((4, 1)), np.ones(3))


class TestBernoulli:
    def test_irls_matches_truth(self, rng):
        n = 5000
        x = rng.normal(size=n)
        design = np.column_stack([np.ones(n), x])
        y = (rng.random(n) < expit(-0.5 + 1.2 * x)).astype(float)
        model = fit_regression(Family.BERNOULLI, design, y)
        np.testing.assert_allclose(model.coefficients, [-0.5, 1.2], atol=0.15)
        assert model.iterations >= 1

    def test_score_vanishes_at_optimum(self, rng):
        n = 400
        x = rng.normal(size=(n, 2))
        design = np.column_stack([np.ones(n), x])
        y = (rng.random(n) < expit(x[:, 0] - x[:, 1])).astype(float)
        model = fit_regression(Family.BERNOULLI, design, y, ridge=1e-3)
        np.testing.assert_allclose(logistic_gradient(model, design, y, 1e-3), 0.0, atol=1e-6)

    def test_intercept_only_is_sample_mean(self):
        y = np.array([1.0, 0.0, 0.0, 1.0, 1.0])
        model = fit_regression(Family.BERNOULLI, np.ones((5, 1)), y)
        assert predict(model, np.ones(1)) == pytest.approx(0.6)

    def test_probabilities_are_clamped(self):
        x = np.array([-3.0, -2.0, -1.0, 1.0, 2.0, 3.0])
        design = np.column_stack([np.ones(6), x])
        y = (x > 0).astype(float)
        # perfectly separated; the ridge keeps the coefficients finite
        model = fit_regression(Family.BERNOULLI, design, y, ridge=1.0)
        p = predict_batch(model, design, clamp=0.05)
        assert p.min() >= 0.05
        assert p.max() <= 0.95

    def test_rejects_non_binary_response(self):
        with pytest.raises(ValueError):
            fit_regression(Family.BERNOULLI, np.ones((3, 1)), np.array([0.0, 0.5, 1.0]))

    def test_predict_width_checked(self):
        model = fit_regression(Family.BERNOULLI, np.ones((4, 1)), np.array([0.0, 1.0, 1.0, 0.0]))
        with pytest.raises(DimensionMismatch):
            predict(model, np.ones(2))
