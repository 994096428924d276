"""Tests for seeding, sweeps, caching and merging of rejection tables."""

import math

import pandas as pd
import pytest

from causal_evidence import simulate
from causal_evidence.errors import ConfigError, TooFewModels
from causal_evidence.models import (
    BasisKind,
    BasisSpec,
    ModelKind,
    RejectionRow,
    RejectionTable,
    SweepConfig,
)
from causal_evidence.simulate import (
    CSV_COLUMNS,
    derive_seed,
    merge_tables,
    run_sweep,
    summarize,
    sweep_specs,
)
from causal_evidence.sweep_cache import SweepCache
from conftest import SEED

LINEAR = BasisSpec(kind=BasisKind.LINEAR)


def small_sweep(**overrides) -> SweepConfig:
    fields = {
        "scenario": "BI-a",
        "n_grid": [150],
        "beta_values": [0.0, 10.0],
        "reps": 4,
        "master_seed": SEED,
        "basis": LINEAR,
    }
    fields.update(overrides)
    return SweepConfig(**fields)


def row(**overrides) -> RejectionRow:
    fields = {
        "scenario": "BI-a",
        "n": 100,
        "beta": 0.0,
        "alpha": 0.05,
        "reps": 2,
        "rejections": 1,
        "degenerate": 0,
        "failures": 0,
        "models": ["backdoor", "iv"],
        "t_stats": [1.0, 2.5],
        "rep_ranges": [(0, 2)],
    }
    fields.update(overrides)
    return RejectionRow(**fields)


class TestSeeds:
    def test_stable_and_distinct(self):
        seed = derive_seed(1, "BFI-a", 100, 0.0, 0)
        assert seed == derive_seed(1, "BFI-a", 100, 0.0, 0)
        assert seed != derive_seed(1, "BFI-a", 100, 0.0, 1)
        assert seed != derive_seed(1, "BFI-b-nonzero", 100, 0.0, 0)
        assert 0 <= seed < 2**64

    def test_integer_and_float_beta_agree(self):
        assert derive_seed(7, "BI-a", 250, 10, 3) == derive_seed(7, "BI-a", 250, 10.0, 3)


class TestSweepSpecs:
    def test_applies_sweep_basis(self):
        specs = sweep_specs(small_sweep())
        assert [spec.kind for spec in specs] == [ModelKind.BACKDOOR, ModelKind.IV]
        assert all(spec.basis == LINEAR for spec in specs)

    def test_unsupported_model(self):
        with pytest.raises(ConfigError, match="frontdoor"):
            sweep_specs(small_sweep(models=[ModelKind.FRONTDOOR]))

    def test_single_model_family(self):
        with pytest.raises(TooFewModels):
            sweep_specs(small_sweep(scenario="FAITH"))

    def test_subset_below_two(self):
        with pytest.raises(TooFewModels):
            sweep_specs(small_sweep(models=[ModelKind.IV]))


class TestRunSweep:
    def test_grid_shape(self):
        table = run_sweep(small_sweep(n_grid=[150, 100]))
        assert [(r.beta, r.n) for r in table.rows] == [
            (0.0, 100),
            (0.0, 150),
            (10.0, 100),
            (10.0, 150),
        ]
        for r in table.rows:
            assert r.reps == 4
            assert r.rejections + r.failures <= 4
            assert r.models == ["backdoor", "iv"]
            assert r.rep_ranges == [(0, 4)]

    def test_reproducible(self):
        first, second = run_sweep(small_sweep()), run_sweep(small_sweep())
        assert first == second

    def test_workers_do_not_change_results(self):
        assert run_sweep(small_sweep(), workers=2) == run_sweep(small_sweep())

    def test_split_reps_merge_to_single_run(self):
        whole = run_sweep(small_sweep())
        head = run_sweep(small_sweep(reps=2))
        tail = run_sweep(small_sweep(reps=2, rep_start=2))
        merged = merge_tables(tail, head)
        assert merged == whole
        for a, b in zip(merged.rows, whole.rows, strict=True):
            assert a.mean_t_stat == b.mean_t_stat

    def test_callbacks(self):
        reps, points = [], []
        run_sweep(small_sweep(), on_rep=lambda: reps.append(1), on_point=points.append)
        assert len(reps) == 8
        assert len(points) == 2

    def test_strong_effect_is_detected(self):
        table = run_sweep(small_sweep(n_grid=[400], beta_values=[10.0]))
        assert table.row(400, 10.0).rejection_rate == 1.0

    def test_failures_count_as_non_rejections(self, monkeypatch):
        def broken(*args, **kwargs):
            raise TooFewModels(0)

        monkeypatch.setattr(simulate, "run_estimators", broken)
        table = run_sweep(small_sweep(beta_values=[0.0]))
        r = table.rows[0]
        assert r.failures == 4
        assert r.rejections == 0
        assert math.isnan(r.mean_t_stat)


class TestCache:
    def test_second_run_reads_cache(self, tmp_path, monkeypatch):
        cache = SweepCache(tmp_path / "cache")
        first = run_sweep(small_sweep(), cache=cache)
        assert len(cache.get_cache_info()["cached_points"]) == 2

        def unexpected(task):
            raise AssertionError("rep recomputed")

        monkeypatch.setattr(simulate, "_run_rep", unexpected)
        assert run_sweep(small_sweep(), cache=cache) == first

    def test_key_includes_rep_range(self, tmp_path):
        cache = SweepCache(tmp_path)
        run_sweep(small_sweep(reps=2), cache=cache)
        run_sweep(small_sweep(reps=2, rep_start=2), cache=cache)
        assert len(cache.get_cache_info()["cached_points"]) == 4

    def test_corrupt_entry_is_a_miss(self, tmp_path):
        cache = SweepCache(tmp_path)
        key = {"scenario": "BI-a", "n": 100}
        cache.cache_row(key, row())
        assert cache.get_row(key) == row()
        for path in tmp_path.glob("*.json"):
            if not path.name.endswith(".meta.json"):
                path.write_text("{not json")
        assert cache.get_row(key) is None

    def test_clear(self, tmp_path):
        cache = SweepCache(tmp_path)
        cache.cache_row({"k": 1}, row())
        cache.cache_row({"k": 2}, row(n=200))
        cache.clear_cache({"k": 1})
        assert cache.get_row({"k": 1}) is None
        assert cache.get_row({"k": 2}) is not None
        cache.clear_cache()
        assert cache.get_cache_info()["total_files"] == 0


class TestMergeAndSummarize:
    def test_overlapping_ranges_rejected(self):
        first = RejectionTable(rows=[row()])
        second = RejectionTable(rows=[row(rep_ranges=[(1, 3)])])
        with pytest.raises(ValueError, match="overlap"):
            merge_tables(first, second)

    def test_merge_adds_counts(self):
        merged = merge_tables(
            RejectionTable(rows=[row()]),
            RejectionTable(rows=[row(rep_ranges=[(2, 4)], rejections=2, t_stats=[3.0, 4.5])]),
        )
        (r,) = merged.rows
        assert r.reps == 4
        assert r.rejections == 3
        assert r.rep_ranges == [(0, 4)]
        assert r.mean_t_stat == pytest.approx(11.0 / 4)

    def test_disjoint_ranges_stay_separate(self):
        merged = merge_tables(
            RejectionTable(rows=[row()]), RejectionTable(rows=[row(rep_ranges=[(5, 7)])])
        )
        assert merged.rows[0].rep_ranges == [(0, 2), (5, 7)]

    def test_summarize_columns(self, tmp_path):
        path = tmp_path / "rates.csv"
        summarize(RejectionTable(rows=[row(beta=10.0), row()]), path)
        frame = pd.read_csv(path)
        assert list(frame.columns) == CSV_COLUMNS
        assert list(frame["beta"]) == [0.0, 10.0]
        assert frame["rejection_rate"][0] == pytest.approx(0.5)
        assert frame["models"][0] == "backdoor|iv"

    def test_summarize_empty(self, tmp_path):
        with pytest.raises(ValueError):
            summarize(RejectionTable(), tmp_path / "empty.csv")
