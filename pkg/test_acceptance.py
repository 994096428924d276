"""Monte Carlo size and power of the product test, plus large-n checks of the samplers.

These take minutes; run them with ``pytest --runslow``.
"""

import numpy as np
import pytest

from causal_evidence.estimators import estimate
from causal_evidence.models import ModelKind, ScenarioConfig, SweepConfig
from causal_evidence.scenarios import FAITH_EFFECT, SCENARIOS, get_scenario
from causal_evidence.simulate import draw, generate, run_sweep, true_effect

SEED = 1729
N = 1000

pytestmark = pytest.mark.slow


def rejection_rate(scenario, beta, *, n=N, reps=1000, models=None):
    config = SweepConfig(
        scenario=scenario,
        n_grid=[n],
        beta_values=[beta],
        reps=reps,
        master_seed=SEED,
        models=models,
    )
    return run_sweep(config, workers=4).row(n, beta).rejection_rate


class TestSize:
    def test_exact_when_one_model_is_valid(self):
        # only IV valid; both wrong-model functionals nonzero
        assert 0.03 <= rejection_rate("BFI-bf-collider-nonzero", 0.0) <= 0.07

    def test_conservative_when_all_models_are_valid(self):
        assert rejection_rate("BFI-a", 0.0) <= 0.02

    def test_conservative_when_two_models_are_valid(self):
        assert rejection_rate("BFI-b-nonzero", 0.0) <= 0.03

    def test_competing_adjustment_sets(self):
        assert 0.03 <= rejection_rate("MBD", 0.0) <= 0.07


class TestPower:
    def test_converges_to_one(self):
        assert rejection_rate("BFI-bf-collider-nonzero", 10.0) >= 0.95

    @pytest.mark.parametrize("scenario", ["BFI-b-zero-alt", "BFI-monotonicity-zero-alt"])
    def test_low_when_wrong_functional_vanishes(self, scenario):
        assert rejection_rate(scenario, 10.0) <= 0.25

    def test_competing_adjustment_sets_at_every_size(self):
        config = SweepConfig(
            scenario="MBD",
            n_grid=[250, 500, 750, 1000],
            beta_values=[10.0],
            reps=1000,
            master_seed=SEED,
        )
        table = run_sweep(config, workers=4)
        assert [row.n for row in table.rows] == [250, 500, 750, 1000]
        for row in table.rows:
            assert row.rejection_rate >= 0.95, row.n

    def test_pairwise_subset(self):
        rate = rejection_rate("BFI-a", 10.0, reps=200, models=[ModelKind.BACKDOOR, ModelKind.IV])
        assert rate >= 0.9


class TestSamplerMoments:
    BIG = 1_000_000

    def test_instrument_is_fair_and_relevant(self):
        table = generate(ScenarioConfig(scenario="BFI-a", n=self.BIG, beta=0.0, seed=SEED))
        assert abs(table.instrument.mean() - 0.5) < 0.002
        assert np.corrcoef(table.treatment, table.instrument)[0, 1] > 0

    def test_multiple_backdoor_outcome_coefficient(self):
        table = generate(ScenarioConfig(scenario="MBD", n=self.BIG, beta=0.0, seed=SEED))
        design = np.column_stack(
            [np.ones(self.BIG), table.treatment, table.select(("c2", "c3"))]
        )
        coefficients, *_ = np.linalg.lstsq(design, table.outcome, rcond=None)
        assert coefficients[2] == pytest.approx(4.0, abs=0.02)

    @pytest.mark.parametrize("key", sorted(k for k, s in SCENARIOS.items() if s.family.value != "FAITH"))
    def test_uniform_and_bernoulli_moments(self, key):
        state = draw(ScenarioConfig(scenario=key, n=self.BIG, beta=0.0, seed=SEED))
        uniform_se_mean = np.sqrt(4.0 / 3.0 / self.BIG)
        assert abs(state.u.mean()) < 5 * uniform_se_mean
        assert state.u.var() == pytest.approx(4.0 / 3.0, abs=0.01)
        for name in ("c1", "c2", "c3", "c4"):
            column = state.table.select((name,))[:, 0]
            assert abs(column.mean()) < 5 * uniform_se_mean
            assert column.var() == pytest.approx(4.0 / 3.0, abs=0.01)

    @pytest.mark.parametrize("key", sorted(SCENARIOS))
    def test_converted_scenarios_have_no_defiers(self, key):
        state = draw(ScenarioConfig(scenario=key, n=100_000, beta=0.0, seed=SEED))
        if state.a1 is None or "monotonicity" in key:
            pytest.skip("no defier conversion in this scenario")
        assert np.all(state.a1 >= state.a0)

    def test_null_estimates_are_centred(self):
        table = generate(ScenarioConfig(scenario="BFI-a", n=5000, beta=0.0, seed=SEED))
        for spec in get_scenario("BFI-a").model_specs:
            output = estimate(table, spec)
            assert abs(output.psi_hat) < 3 * output.std_error


class TestUnfaithfulScenario:
    def test_adjusted_contrast_vanishes(self):
        table = generate(ScenarioConfig(scenario="FAITH", n=100_000, beta=0.0, seed=SEED))
        output = estimate(table, get_scenario("FAITH").model_specs[0])
        assert abs(output.psi_hat) < 0.05
        assert true_effect("FAITH", 0.0, n_mc=100_000) == pytest.approx(FAITH_EFFECT)
