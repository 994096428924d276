"""Tests for the joint covariance and the product test."""

import numpy as np
import pytest

from causal_evidence.combine import (
    CovarianceEstimate,
    JointEstimate,
    analyze_all,
    combined_test,
    critical_reject,
    disambiguate,
    estimate_covariance,
    joint,
    product_test,
    run_estimators,
)
from causal_evidence.errors import DuplicateLabel, LengthMismatch, TooFewModels
from causal_evidence.estimators import EstimatorOutput
from causal_evidence.models import ModelKind, ModelSpec
from causal_evidence.scenarios import get_scenario


def output(label, psi, values):
    values = np.asarray(values, dtype=float)
    return EstimatorOutput(label, psi, values - values.mean())


class TestJoint:
    def test_stacks_in_input_order(self):
        stacked = joint([output("b", 1.0, [1, -1, 0]), output("a", 2.0, [0, 2, -2])])
        assert stacked.labels == ("b", "a")
        np.testing.assert_array_equal(stacked.psi, [1.0, 2.0])
        assert stacked.if_matrix.shape == (3, 2)

    def test_needs_two(self):
        with pytest.raises(TooFewModels):
            joint([output("a", 1.0, [1, -1])])

    def test_lengths_must_agree(self):
        with pytest.raises(LengthMismatch):
            joint([output("a", 1.0, [1, -1]), output("b", 1.0, [1, 0, -1])])

    def test_labels_must_be_unique(self):
        with pytest.raises(DuplicateLabel):
            joint([output("a", 1.0, [1, -1]), output("a", 2.0, [2, -2])])

    def test_uncentred_matrix_rejected(self):
        with pytest.raises(ValueError, match="centred"):
            JointEstimate(("a", "b"), np.array([1.0, 2.0]), np.ones((4, 2)))


class TestCovariance:
    def test_matches_outer_product_mean(self, rng):
        matrix = rng.normal(size=(200, 3))
        matrix -= matrix.mean(axis=0)
        stacked = JointEstimate(("a", "b", "c"), np.ones(3), matrix)
        sigma = estimate_covariance(stacked).sigma
        np.testing.assert_allclose(sigma, matrix.T @ matrix / 200)
        np.testing.assert_array_equal(sigma, sigma.T)

    def test_matches_explicit_loops(self, rng):
        n, k = 150, 3
        matrix = rng.normal(size=(n, k)) * [1.0, 4.0, 0.5]
        matrix -= matrix.mean(axis=0)
        sigma = estimate_covariance(JointEstimate(("a", "b", "c"), np.ones(k), matrix)).sigma
        expected = np.zeros((k, k))
        for i in range(n):
            for row in range(k):
                for col in range(k):
                    expected[row, col] += matrix[i, row] * matrix[i, col] / n
        np.testing.assert_allclose(sigma, expected, rtol=0, atol=1e-12)

    def test_hand_computed_pair(self):
        stacked = JointEstimate(("a", "b"), np.ones(2), np.array([[1.0, -1.0], [-1.0, 1.0]]))
        np.testing.assert_allclose(
            estimate_covariance(stacked).sigma, [[1.0, -1.0], [-1.0, 1.0]], rtol=0, atol=1e-12
        )

    def test_singular_condition_number(self):
        values = np.array([1.0, -1.0, 2.0, -2.0])
        stacked = joint([output("a", 1.0, values), output("b", 1.0, values)])
        assert estimate_covariance(stacked).condition_number() == float("inf")

    def test_identity_condition_number(self):
        assert CovarianceEstimate(np.eye(3)).condition_number() == pytest.approx(1.0)

    def test_rejects_indefinite(self):
        with pytest.raises(ValueError):
            CovarianceEstimate(np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            CovarianceEstimate(np.array([[1.0, 0.5], [0.0, 1.0]]))


class TestProductTest:
    def stacked(self, psi, n=100):
        # columns whose mean square is the identity
        column = np.tile([1.0, -1.0], n // 2)
        other = np.repeat([1.0, -1.0, -1.0, 1.0], n // 4)
        return JointEstimate(("a", "b"), np.array(psi), np.column_stack([column, other]))

    def test_hand_computed_statistic(self):
        stacked = self.stacked([2.0, 3.0])
        result = product_test(stacked, CovarianceEstimate(np.eye(2)))
        assert result.product == pytest.approx(6.0)
        assert result.gamma == pytest.approx([3.0, 2.0])
        assert result.variance == pytest.approx(13.0)
        assert result.t_stat == pytest.approx(np.sqrt(100) * 6 / np.sqrt(13), rel=1e-9)
        assert result.t_stat == pytest.approx(16.641, abs=1e-3)
        assert result.reject_at[0.05]
        assert not result.degenerate

    def test_sign_follows_product(self):
        result = product_test(self.stacked([-2.0, 3.0]), CovarianceEstimate(np.eye(2)))
        assert result.t_stat < 0
        assert result.p_value == pytest.approx(
            product_test(self.stacked([2.0, 3.0]), CovarianceEstimate(np.eye(2))).p_value
        )

    def test_zero_estimate_does_not_reject(self):
        result = product_test(self.stacked([0.0, 5.0]), CovarianceEstimate(np.eye(2)))
        assert result.product == 0.0
        assert result.t_stat == 0.0
        assert result.p_value == pytest.approx(1.0)
        assert not result.reject_at[0.05]

    def test_both_zero_is_degenerate(self):
        result = product_test(self.stacked([0.0, 0.0]), CovarianceEstimate(np.eye(2)))
        assert result.degenerate
        assert result.p_value == 1.0
        assert not result.rejects(0.05)
        assert not result.rejects(0.5)

    def test_several_levels(self):
        # solve 10·3x / √(9 + x²) = 2.2 so T sits between the two critical values
        x = np.sqrt(2.2**2 * 9 / (900 - 2.2**2))
        result = product_test(
            self.stacked([x, 3.0]), CovarianceEstimate(np.eye(2)), levels=(0.01, 0.05)
        )
        assert result.t_stat == pytest.approx(2.2)
        assert result.reject_at == {0.01: False, 0.05: True}

    def test_correlation_has_unit_diagonal(self):
        result = product_test(
            self.stacked([1.0, 1.0]), CovarianceEstimate(np.array([[4.0, 1.0], [1.0, 1.0]]))
        )
        np.testing.assert_allclose(result.correlation(), [[1.0, 0.5], [0.5, 1.0]])


class TestCriticalValue:
    def test_two_sided(self):
        assert critical_reject(1.97, 0.05)
        assert critical_reject(-1.97, 0.05)
        assert not critical_reject(1.95, 0.05)


class TestPipeline:
    def test_disambiguates_repeated_kinds(self):
        specs = list(get_scenario("BFI-a").model_specs) + [
            ModelSpec(kind=ModelKind.BACKDOOR, adjustment_covariates=("c1",))
        ]
        assert disambiguate(specs) == [
            "backdoor[c1,c2,c3,c4]",
            "frontdoor",
            "iv",
            "backdoor[c1]",
        ]

    def test_run_needs_two_specs(self, bfi_table):
        with pytest.raises(TooFewModels):
            run_estimators(bfi_table, [ModelSpec(kind=ModelKind.IV)])

    def test_analyze_all(self, bfi_table):
        specs = list(get_scenario("BFI-a").model_specs)
        report = analyze_all(bfi_table, specs, levels=(0.01, 0.05))
        assert [i.label for i in report.intervals] == ["backdoor", "frontdoor", "iv"]
        assert report.result.k == 3
        assert report.result.n == bfi_table.n_rows
        row = report.combined_row()
        assert set(row) >= {"K", "product", "t_stat", "p_value", "degenerate_flag"}
        assert "reject_at_0.01" in row and "reject_at_0.05" in row
        assert len(report.interval_rows()) == 3

    def test_combined_test_matches_manual_steps(self, bfi_table):
        outputs = run_estimators(bfi_table, list(get_scenario("BFI-a").model_specs))
        stacked = joint(outputs)
        manual = product_test(stacked, estimate_covariance(stacked))
        assert combined_test(outputs).t_stat == pytest.approx(manual.t_stat)


class TestInvariants:
    def test_model_order_does_not_matter(self, bfi_table):
        specs = list(get_scenario("BFI-a").model_specs)
        forward = combined_test(run_estimators(bfi_table, specs))
        backward = combined_test(run_estimators(bfi_table, specs[::-1]))
        assert forward.t_stat == pytest.approx(backward.t_stat, rel=1e-10)
        assert forward.labels == backward.labels[::-1]

    def test_outcome_scale_does_not_matter(self, bfi_table):
        specs = list(get_scenario("BFI-a").model_specs)
        base = combined_test(run_estimators(bfi_table, specs))
        scaled_table = bfi_table.with_outcome(3.5 * bfi_table.outcome)
        scaled = combined_test(run_estimators(scaled_table, specs))
        assert scaled.t_stat == pytest.approx(base.t_stat, rel=1e-7)

    def test_influence_values_mean_zero(self, bfi_table):
        for out in run_estimators(bfi_table, list(get_scenario("BFI-a").model_specs)):
            assert abs(out.if_values.mean()) < 1e-8

    def test_covariance_is_psd(self, bfi_table):
        stacked = joint(run_estimators(bfi_table, list(get_scenario("BFI-a").model_specs)))
        cov = estimate_covariance(stacked)
        assert cov.eigenvalues().min() >= -1e-10 * cov.sigma.diagonal().max()
