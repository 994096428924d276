"""Tests for config files, model spec parsing and CLI override merging."""

import pytest

from causal_evidence.config import (
    analysis_from_config,
    load_config,
    merge_overrides,
    settings_from_config,
    sweep_from_config,
)
from causal_evidence.errors import ConfigError
from causal_evidence.models import BasisKind, BasisSpec, ModelKind, ModelSpec


class TestModelSpecParse:
    def test_backdoor_with_adjustment_and_basis(self):
        spec = ModelSpec.parse("backdoor:adj=c1,c2:basis=poly:3")
        assert spec.kind == ModelKind.BACKDOOR
        assert spec.adjustment_covariates == ("c1", "c2")
        assert spec.basis.kind == BasisKind.POLYNOMIAL
        assert spec.basis.degree == 3

    def test_plain_iv(self):
        spec = ModelSpec.parse("iv")
        assert spec.kind == ModelKind.IV
        assert spec.adjustment_covariates == ()

    def test_default_basis_applies(self):
        default = BasisSpec.parse("linear")
        assert ModelSpec.parse("frontdoor:adj=c1", default_basis=default).basis == default

    def test_interactions_override_default_basis(self):
        default = BasisSpec.parse("poly:2")
        spec = ModelSpec.parse("backdoor:adj=c1,c2:interactions=true", default_basis=default)
        assert spec.basis.include_interactions
        assert spec.basis.kind == BasisKind.POLYNOMIAL
        assert spec.basis.degree == 2
        assert not default.include_interactions

    def test_default_basis_keeps_its_interactions(self):
        default = BasisSpec.parse("linear", include_interactions=True)
        assert ModelSpec.parse("frontdoor:adj=c1", default_basis=default).basis.include_interactions
        off = ModelSpec.parse("frontdoor:adj=c1:interactions=false", default_basis=default)
        assert not off.basis.include_interactions

    def test_label(self):
        spec = ModelSpec.parse("backdoor:adj=c1:label=short")
        assert spec.display_label() == "short"
        assert spec.qualified_label() == "short"

    def test_qualified_label(self):
        assert ModelSpec.parse("backdoor:adj=c1,c3").qualified_label() == "backdoor[c1,c3]"

    @pytest.mark.parametrize("text", ["sideways", "backdoor:weights=1", "backdoor:c1"])
    def test_malformed(self, text):
        with pytest.raises(ValueError):
            ModelSpec.parse(text)


class TestBasisSpec:
    @pytest.mark.parametrize(
        ("text", "label"),
        [("linear", "linear"), ("poly:4", "poly:4"), ("spline", "spline:3"), ("spline:5", "spline:5")],
    )
    def test_labels(self, text, label):
        assert BasisSpec.parse(text).label() == label

    @pytest.mark.parametrize("text", ["poly:1", "poly:9", "spline:0", "cubic"])
    def test_out_of_range(self, text):
        with pytest.raises(ValueError):
            BasisSpec.parse(text)


class TestLoadConfig:
    def test_yaml(self, tmp_path):
        path = tmp_path / "sweep.yaml"
        path.write_text("name: demo\nscenario: BFI-a\nn-grid: [100, 200]\nseed: 3\n")
        data = load_config(path)
        assert data["n_grid"] == [100, 200]
        config = sweep_from_config(data)
        assert config.n_grid == [100, 200]
        assert config.master_seed == 3

    def test_key_value_with_repeated_models(self, tmp_path):
        path = tmp_path / "analysis.conf"
        path.write_text(
            "# framingham-style run\n"
            "outcome = y\n"
            "treatment = a\n"
            "covariates = c1, c2\n"
            "model = backdoor:adj=c1,c2\n"
            "model = backdoor:adj=c1  # smaller set\n"
            "alpha = 0.01, 0.05\n"
        )
        config = analysis_from_config(load_config(path))
        assert len(config.models) == 2
        assert config.models[1].adjustment_covariates == ("c1",)
        assert config.alphas == [0.01, 0.05]
        assert config.mapping.covariate_names == ["c1", "c2"]

    def test_duplicate_key(self, tmp_path):
        path = tmp_path / "bad.conf"
        path.write_text("seed = 1\nseed = 2\n")
        with pytest.raises(ConfigError, match="duplicate"):
            load_config(path)

    def test_missing_equals(self, tmp_path):
        path = tmp_path / "bad.conf"
        path.write_text("seed 1\n")
        with pytest.raises(ConfigError, match=":1:"):
            load_config(path)

    def test_yaml_must_be_mapping(self, tmp_path):
        path = tmp_path / "list.yaml"
        path.write_text("- 1\n- 2\n")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_unreadable(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "missing.yaml")


class TestSweepConfig:
    def test_seed_required(self):
        with pytest.raises(ConfigError, match="seed"):
            sweep_from_config({"scenario": "BFI-a"})

    def test_defaults(self):
        config = sweep_from_config({"scenario": "BFI-a", "seed": 1})
        assert config.n_grid == [100, 250, 500, 750, 1000]
        assert config.beta_values == [0.0, 10.0]
        assert config.reps == 1000
        assert config.alpha == 0.05
        assert config.basis == BasisSpec()
        assert config.models is None

    def test_models_and_basis(self):
        config = sweep_from_config(
            {"scenario": "BFI-a", "seed": 1, "models": "backdoor, iv", "basis": "poly:2", "interactions": "yes"}
        )
        assert config.models == [ModelKind.BACKDOOR, ModelKind.IV]
        assert config.basis.kind == BasisKind.POLYNOMIAL
        assert config.basis.include_interactions

    @pytest.mark.parametrize(
        "bad",
        [
            {"reps": 0},
            {"alpha": 1.5},
            {"n_grid": "1"},
            {"models": "mediation"},
            {"basis": "poly:0"},
            {"colour": "red"},
        ],
    )
    def test_invalid(self, bad):
        with pytest.raises(ConfigError):
            sweep_from_config({"scenario": "BFI-a", "seed": 1, **bad})

    def test_settings_pass_through(self):
        config = sweep_from_config({"scenario": "BFI-a", "seed": 1, "ridge": 0.5})
        assert config.settings.ridge == 0.5


class TestAnalysisConfig:
    def test_missing_outcome(self):
        with pytest.raises(ConfigError, match="outcome"):
            analysis_from_config({"treatment": "a"})

    def test_per_model_interactions(self):
        config = analysis_from_config(
            {
                "outcome": "y",
                "treatment": "a",
                "covariates": "c1, c2",
                "basis": "spline:3",
                "model": ["backdoor:adj=c1,c2:interactions=true", "backdoor:adj=c1"],
            }
        )
        first, second = config.models
        assert first.basis.include_interactions
        assert first.basis.knots_per_covariate == 3
        assert not second.basis.include_interactions

    def test_bad_alpha(self):
        with pytest.raises(ConfigError):
            analysis_from_config({"outcome": "y", "treatment": "a", "alpha": "1.2"})

    def test_bad_settings(self):
        with pytest.raises(ConfigError):
            settings_from_config({"propensity_clamp": 0.7})


class TestMergeOverrides:
    def test_given_values_win(self):
        merged = merge_overrides({"reps": 10, "seed": 1}, {"reps": 5, "seed": None, "models": ()})
        assert merged == {"reps": 5, "seed": 1}

    def test_false_flag_is_an_override(self):
        assert merge_overrides({"interactions": True}, {"interactions": False}) == {"interactions": False}
